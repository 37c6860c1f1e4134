import logging

pkg_root = logging.getLogger("lccde")


def getLogger(name: str | None):
    if not name:
        return pkg_root
    return pkg_root.getChild(name)


def configure_cli_logging(verbosity: int = 0) -> None:
    """Attach a stderr handler for command-line runs.

    Library code never calls this; only the ``lccde`` entry point does.
    """
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    pkg_root.setLevel(level)
