"""cli/parser.py のテスト"""

import argparse
from pathlib import Path

import pytest

from cli.parser import build_parser, overrides_from_args


class TestBuildParser:
    """build_parser関数のテスト"""

    def test_generate_flags(self):
        """共通フラグが解釈されること"""
        args = build_parser().parse_args(
            ["generate", "--net", "patched", "--sides", "2,3,5", "--out", "runs/a"]
        )
        assert args.command == "generate"
        assert args.sides == [2, 3, 5]
        assert args.out == Path("runs/a")
        assert args.radius is None

    def test_radii_list(self):
        """--radii はカンマ区切りの実数"""
        args = build_parser().parse_args(["density", "--radii", "10,20.5"])
        assert args.radii == [10.0, 20.5]

    def test_suite_only_for_verify(self):
        """--suite は verify だけが受け付けること"""
        args = build_parser().parse_args(["verify", "--suite", "oracle"])
        assert args.suite == "oracle"
        with pytest.raises(SystemExit):
            build_parser().parse_args(["generate", "--suite", "oracle"])

    def test_bad_list_rejected(self):
        """整数でない辺は argparse のエラーになること"""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["generate", "--sides", "2,x"])

    def test_command_required(self):
        """サブコマンドは必須"""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestOverridesFromArgs:
    """overrides_from_args関数のテスト"""

    def test_net_keys_prefixed(self):
        """ネットのフラグは "net." 付きのキーになること"""
        args = build_parser().parse_args(["generate", "--net", "radial", "--phi", "log"])
        overrides = overrides_from_args(args)
        assert overrides["command"] == "generate"
        assert overrides["net.family"] == "radial"
        assert overrides["net.phi"] == "log"
        assert overrides["net.dim"] is None
        assert "plots" not in overrides

    def test_no_plots(self):
        """--no-plots で plots が False になること"""
        args = build_parser().parse_args(["displacement", "--no-plots"])
        assert overrides_from_args(args)["plots"] is False

    def test_missing_suite_attribute(self):
        """verify 以外では suite は None"""
        args = build_parser().parse_args(["density"])
        assert isinstance(args, argparse.Namespace)
        assert overrides_from_args(args)["suite"] is None
