VERSION: str = "0.1"
