"""Dataset ingestion and report emission"""
