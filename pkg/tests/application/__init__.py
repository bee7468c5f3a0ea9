"""Application層のテスト"""
