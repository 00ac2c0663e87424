import importlib.util
import sys


REQUIRED_DEPENDENCIES = {
    "rich": "rich",
    "numpy": "numpy",
    "networkx": "networkx",
    "matplotlib": "matplotlib",
}
COMMAND_NAME = "latres"


def _missing_dependencies() -> list[str]:
    return [
        package
        for module_name, package in REQUIRED_DEPENDENCIES.items()
        if importlib.util.find_spec(module_name) is None
    ]


def main(argv: list[str] | None = None) -> int:
    missing = _missing_dependencies()
    if missing:
        print(
            f"{COMMAND_NAME}: missing dependencies: {', '.join(missing)}\n"
            f"install them with: {sys.executable} -m pip install {' '.join(missing)}",
            file=sys.stderr,
        )
        return 2

    from latres.cli import main as cli_main

    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
