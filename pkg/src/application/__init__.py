"""アプリケーション層。

このパッケージは、ビジネスユースケースを調整するApplication層を提供します。
CLI層とDomain層の橋渡しを担当します。
"""
