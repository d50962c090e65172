import pymysql

MYSQL_HOST = "52.4.11.21"
APP_USER = "svc_app"
DB_PASSWORD = "Qp7#saTz"

conn = pymysql.connect(host=MYSQL_HOST, user=APP_USER, password=DB_PASSWORD, db="db_patient", port=3306)
cur = conn.cursor()
cur.execute("SELECT name, disease FROM patient_info WHERE id=1")
