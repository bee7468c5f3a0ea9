"""Separated Net Lab - コマンドラインのエントリポイント

分離ネット(動径再配置・密度パッチ・反例)を構成し、変位の上下界を
有限窓の上で検証します。

Usage:
    python app.py generate --net radial --phi sqrt --radius 600
    python app.py displacement --net onedim --dim 1
    python app.py verify --suite default
    python app.py density --net halfspace --c 1.5 --radius 500
"""

import sys

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
