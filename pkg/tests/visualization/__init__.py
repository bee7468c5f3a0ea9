"""可視化モジュールのテスト"""
