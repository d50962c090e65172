from pymongo import MongoClient

MONGO_HOST = "52.4.12.22"

client = MongoClient(host=MONGO_HOST, port=27017, username="svc_shop", password="m0ngP@ss1")
db = client["shop"]
orders = db["orders"]


def record_order(addr, num):
    orders.insert_one({"email": addr, "phone": num})
