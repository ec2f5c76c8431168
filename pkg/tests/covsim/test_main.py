import pytest

from covsim import __version__
from covsim import main


def test_arg_parse():
    parser = main.create_parser()
    res = parser.parse_args([])

    assert res.debug == 0
    assert res.help_actions is False
    assert res.action == []


def test_arg_parse_debug():
    parser = main.create_parser()
    res = parser.parse_args(["-dd", "list-presets"])

    assert res.debug == 2
    assert res.action == ["list-presets"]


def test_arg_parse_action_arguments():
    parser = main.create_parser()
    res = parser.parse_args(["run", "config.json", "--seed", "3"])

    assert res.action == ["run", "config.json", "--seed", "3"]


def test_version(capsys):
    with pytest.raises(SystemExit):
        main.create_parser().parse_args(["--version"])

    assert __version__ in capsys.readouterr().out


def test_main_without_action_prints_help(capsys):
    assert main.main([]) == 0

    assert "list-presets" in capsys.readouterr().out


def test_main_runs_action(capsys):
    assert main.main(["list-presets"]) == 0

    assert "fig6b" in capsys.readouterr().out


def test_interrupt_restores_default_handlers(mocker):
    install = mocker.patch("covsim.main.signal.signal")

    with pytest.raises(SystemExit, match="interrupted by SIGINT"):
        main._interrupted(main.signal.SIGINT, None)

    assert install.call_count == 2
