import itertools
import socket
import urllib.request

import pytest

from secretrisk.model import AssetIdentifier, DbType
from secretrisk.netinfo import (
    EaseLevel,
    FixtureDnsProvider,
    FixtureScanProvider,
    HostEvidence,
    HttpLlmClassifier,
    PLACEHOLDER_SYSTEM_PROMPT,
    ProbeCache,
    assign_ease,
    check_port,
    detect_placeholder,
    ease_rank,
    evaluate_host,
    evaluate_hosts,
    is_routable,
    placeholder_user_prompt,
    resolve_dns,
    rule_based_placeholder,
    validate_dns_format,
    validate_ip,
)


# --- DNS format -----------------------------------------------------------------


def test_dns_format_valid_names():
    assert validate_dns_format("sh1.cirray.cn")
    assert validate_dns_format("kraken.shore.mbari.org")
    assert validate_dns_format("a-b.example.com")


def test_dns_format_rejects_bad_labels():
    assert not validate_dns_format("-bad-.example.com")
    assert not validate_dns_format("bad-.example.com")
    assert not validate_dns_format("a..b")
    assert not validate_dns_format("a" * 64 + ".com")
    assert not validate_dns_format("singlelabel")
    assert not validate_dns_format("host.123")
    assert not validate_dns_format("x" * 250 + ".abc.com")


# --- placeholder detection --------------------------------------------------------


@pytest.mark.parametrize(
    "host,expected",
    [
        ("www.example.com", True),
        ("kraken.shore.mbari.org", False),
        ("your-project-name.com", True),
        ("x.x.x.x", True),
        ("0.0.0.0", True),
        ("db.fixture.test", False),
        ("sh1.cirray.cn", False),
        ("dummy-db.net", True),
        ("gg-is-awesome-246.mongodb.net", False),
    ],
)
def test_rule_based_placeholder(host, expected):
    assert rule_based_placeholder(host) is expected


class _StubLlm:
    def __init__(self, verdict):
        self.verdict = verdict
        self.calls = 0

    def classify(self, dns, source_code):
        self.calls += 1
        if isinstance(self.verdict, Exception):
            raise self.verdict
        return self.verdict


def test_placeholder_llm_consulted_when_rules_inconclusive():
    llm = _StubLlm(True)
    assert detect_placeholder("staging-db.corp.net", "ctx", llm) is True
    assert llm.calls == 1


def test_placeholder_llm_failure_falls_back_to_rules():
    diagnostics: list[str] = []
    llm = _StubLlm(RuntimeError("api down"))
    assert detect_placeholder("staging-db.corp.net", "ctx", llm, diagnostics) is False
    assert diagnostics


def test_placeholder_prompt_contents():
    assert '"www.example.com" is a placeholder/dummy DNS name' in PLACEHOLDER_SYSTEM_PROMPT
    assert "kraken.shore.mbari.org" in PLACEHOLDER_SYSTEM_PROMPT
    user = placeholder_user_prompt("db.host.io", "code here")
    assert 'Is the DNS name "db.host.io"' in user
    assert "code here" in user
    payload = HttpLlmClassifier("key").build_payload("db.host.io", "snippet")
    assert payload["temperature"] == 0.2
    assert payload["messages"][0]["role"] == "system"


# --- resolution -------------------------------------------------------------------


DNS = FixtureDnsProvider(
    {
        "db.fixture.test": ("ip", "203.0.113.5"),
        "a.fixture.test": ("cname", "b.fixture.test"),
        "b.fixture.test": ("ip", "93.184.216.34"),
        "loop.fixture.test": ("cname", "loop.fixture.test"),
    }
)


def test_resolve_fixture_name():
    assert resolve_dns("db.fixture.test", DNS) == "203.0.113.5"


def test_resolve_follows_cname_chain():
    assert resolve_dns("a.fixture.test", DNS) == "93.184.216.34"


def test_resolve_unresolvable_and_loops():
    assert resolve_dns("missing.fixture.test", DNS) is None
    assert resolve_dns("loop.fixture.test", DNS) is None


# --- IP validity and routability ----------------------------------------------------


def test_ip_validity():
    assert validate_ip("127.0.0.1")
    assert validate_ip("::1")
    assert not validate_ip("x.x.x.x")
    assert not validate_ip("999.1.1.1")


@pytest.mark.parametrize(
    "ip,routable",
    [
        ("127.0.0.1", False),       # loopback
        ("192.168.1.1", False),     # private
        ("10.0.0.1", False),        # private
        ("169.254.1.1", False),     # link-local
        ("0.0.0.0", False),         # unspecified
        ("224.0.0.1", False),       # multicast
        ("240.0.0.1", False),       # reserved
        ("203.0.113.5", False),     # documentation
        ("fe80::1", False),         # v6 link-local
        ("fc00::1", False),         # unique-local
        ("111.230.140.27", True),
        ("93.184.216.34", True),
        ("2606:2800:21f:cb07:6820:80da:af6b:8b2c", True),
    ],
)
def test_routability(ip, routable):
    assert is_routable(ip) is routable


# --- scanning and port checks ---------------------------------------------------------


SCAN = FixtureScanProvider({"93.184.216.34": {22, 3306}, "120.77.222.217": {22, 80}})


def test_probe_scannable_fixture():
    from secretrisk.netinfo import probe_scannable

    scannable, ports = probe_scannable("93.184.216.34", SCAN)
    assert scannable is True
    assert ports == {22, 3306}


def test_probe_absent_ip_not_scannable():
    from secretrisk.netinfo import probe_scannable

    scannable, ports = probe_scannable("8.8.8.8", SCAN)
    assert scannable is False
    assert ports == set()


def test_probe_provider_error_degrades():
    from secretrisk.netinfo import probe_scannable

    class Broken:
        def lookup(self, ip):
            raise TimeoutError("rate limited")

    diagnostics: list[str] = []
    scannable, ports = probe_scannable("1.2.3.4", Broken(), diagnostics)
    assert scannable is None
    assert diagnostics


def test_check_port_uses_db_type_default():
    evidence = HostEvidence(raw_host="h", open_ports={22, 3306})
    assert check_port(evidence, AssetIdentifier(host="h", db_type=DbType.MYSQL)) is True
    evidence = HostEvidence(raw_host="h", open_ports={80})
    assert check_port(evidence, AssetIdentifier(host="h", db_type=DbType.POSTGRESQL)) is False


def test_check_port_explicit_port_overrides_default():
    evidence = HostEvidence(raw_host="h", open_ports={27018})
    asset = AssetIdentifier(host="h", port=27018, db_type=DbType.MONGODB)
    assert check_port(evidence, asset) is True
    evidence = HostEvidence(raw_host="h", open_ports={27017})
    assert check_port(evidence, asset) is False


# --- classification matrix -------------------------------------------------------------


def _matrix_evidence() -> dict[str, HostEvidence]:
    asset = AssetIdentifier(host="h", db_type=DbType.MYSQL)
    hosts = {
        "placeholder": "www.example.com",
        "unresolvable": "gone.oldcorp.net",
        "localhost": "127.0.0.1",
        "private": "192.168.1.1",
        "routable-unscannable": "111.230.140.27",
        "scannable-port-closed": "120.77.222.217",
        "scannable-port-open": "a.fixture.test",
    }
    return {
        label: evaluate_host(host, asset, DNS, SCAN) for label, host in hosts.items()
    }


def test_fixture_matrix_classification():
    evidence = _matrix_evidence()
    expectations = {
        "placeholder": EaseLevel.VERY_DIFFICULT,
        "unresolvable": EaseLevel.VERY_DIFFICULT,
        "localhost": EaseLevel.VERY_DIFFICULT,
        "private": EaseLevel.VERY_DIFFICULT,
        "routable-unscannable": EaseLevel.DIFFICULT,
        "scannable-port-closed": EaseLevel.MODERATE,
        "scannable-port-open": EaseLevel.EASY,
    }
    for label, expected in expectations.items():
        assert assign_ease(evidence[label]).level == expected, label


def test_table3_mapping_downgrades_port_closed_only():
    evidence = _matrix_evidence()
    assert assign_ease(evidence["scannable-port-closed"], "Table3").level == EaseLevel.DIFFICULT
    assert assign_ease(evidence["scannable-port-open"], "Table3").level == EaseLevel.EASY
    assert assign_ease(evidence["routable-unscannable"], "Table3").level == EaseLevel.DIFFICULT


def test_paper_easy_and_localhost_examples():
    asset = AssetIdentifier(host="h", db_type=DbType.MYSQL)
    localhost = evaluate_host("127.0.0.1", asset, DNS, SCAN)
    assert assign_ease(localhost).level == EaseLevel.VERY_DIFFICULT
    open_port = evaluate_host("b.fixture.test", asset, DNS, SCAN)
    assert assign_ease(open_port).level == EaseLevel.EASY


# --- monotonicity over all 64 checkpoint combinations -------------------------------


class _TogglingDns:
    def __init__(self, resolvable: bool):
        self.resolvable = resolvable

    def lookup(self, name):
        return ("ip", "93.184.216.34") if self.resolvable else None


class _TogglingScan:
    def __init__(self, scannable: bool, port_open: bool):
        self.scannable = scannable
        self.port_open = port_open

    def lookup(self, ip):
        if not self.scannable:
            return None
        return {3306} if self.port_open else {80}


def _evidence_for_toggles(toggles: tuple[bool, ...]) -> HostEvidence:
    """Build evidence by running the pipeline with providers that realize the
    would-be outcome of each of the six checkpoints."""
    valid_dns, resolvable, valid_ip, routable, scannable, port_open = toggles
    host = "db.corp-net.io" if valid_dns else "-bad-.corp-net.io"
    dns_ip = "93.184.216.34" if routable else "192.168.1.1"

    class Dns:
        def lookup(self, name):
            if not resolvable:
                return None
            return ("ip", dns_ip if valid_ip else "not-an-ip")

    asset = AssetIdentifier(host=host, db_type=DbType.MYSQL)
    return evaluate_host(host, asset, Dns(), _TogglingScan(scannable, port_open))


def test_monotonicity_under_exhaustive_toggling():
    """Turning any earlier checkpoint off never raises the assigned level."""
    combos = list(itertools.product([False, True], repeat=6))
    assert len(combos) == 64
    levels = {c: assign_ease(_evidence_for_toggles(c)).level for c in combos}
    for combo in combos:
        for index in range(6):
            if not combo[index]:
                continue
            weakened = list(combo)
            weakened[index] = False
            weaker_level = levels[tuple(weakened)]
            assert ease_rank(weaker_level) <= ease_rank(levels[combo]), (
                combo,
                index,
                weaker_level,
                levels[combo],
            )


def test_counter_counts_passed_checkpoints():
    asset = AssetIdentifier(host="h", db_type=DbType.MYSQL)
    assert evaluate_host("www.example.com", asset, DNS, SCAN).counter == 0
    assert evaluate_host("gone.oldcorp.net", asset, DNS, SCAN).counter == 1
    assert evaluate_host("127.0.0.1", asset, DNS, SCAN).counter == 1
    assert evaluate_host("111.230.140.27", asset, DNS, SCAN).counter == 2
    assert evaluate_host("120.77.222.217", asset, DNS, SCAN).counter == 3
    assert evaluate_host("a.fixture.test", asset, DNS, SCAN).counter == 6


def test_counter_is_nondecreasing_in_level():
    evidence = _matrix_evidence()
    ranked = sorted(evidence.values(), key=lambda e: ease_rank(assign_ease(e).level))
    dns_chain = [e for e in ranked if e.raw_host not in ("127.0.0.1", "192.168.1.1")]
    counters = [e.counter for e in dns_chain]
    assert counters == sorted(counters)


# --- offline determinism and network purity -----------------------------------------


def test_offline_evaluation_is_deterministic():
    asset = AssetIdentifier(host="h", db_type=DbType.MYSQL)
    first = evaluate_host("a.fixture.test", asset, DNS, SCAN)
    second = evaluate_host("a.fixture.test", asset, DNS, SCAN)
    assert first == second


def test_no_network_calls_with_fixture_providers(monkeypatch):
    def deny(*args, **kwargs):
        raise AssertionError("network touched during offline evaluation")

    monkeypatch.setattr(socket, "getaddrinfo", deny)
    monkeypatch.setattr(socket, "create_connection", deny)
    monkeypatch.setattr(urllib.request, "urlopen", deny)

    asset = AssetIdentifier(host="h", db_type=DbType.MYSQL)
    requests = {
        "a.fixture.test|3306": ("a.fixture.test", asset),
        "127.0.0.1|3306": ("127.0.0.1", asset),
        "www.example.com|3306": ("www.example.com", asset),
    }
    results = evaluate_hosts(requests, DNS, SCAN, concurrency=4)
    assert len(results) == 3


def test_probe_cache_round_trip(tmp_path):
    cache_file = tmp_path / "probes.json"
    cache = ProbeCache(cache_file, ttl=3600)
    evidence = evaluate_host(
        "a.fixture.test", AssetIdentifier(host="h", db_type=DbType.MYSQL), DNS, SCAN
    )
    cache.put("a.fixture.test|3306", evidence)
    cache.flush()

    reloaded = ProbeCache(cache_file, ttl=3600)
    restored = reloaded.get("a.fixture.test|3306")
    assert restored is not None
    assert restored.resolved_ip == evidence.resolved_ip
    assert restored.open_ports == evidence.open_ports
    assert assign_ease(restored).level == assign_ease(evidence).level


def test_probe_cache_expires(tmp_path):
    cache_file = tmp_path / "probes.json"
    cache = ProbeCache(cache_file, ttl=0)
    cache.put("k", HostEvidence(raw_host="h"))
    cache.flush()
    import time

    time.sleep(0.01)
    assert ProbeCache(cache_file, ttl=0).get("k") is None
