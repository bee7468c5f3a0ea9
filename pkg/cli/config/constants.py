"""CLI-related constants for Separated Net Lab."""

# ===== Program =====
PROG = "netlab"
COMMANDS = ("generate", "displacement", "verify", "density")


# ===== Exit Codes =====
EXIT_OK = 0
EXIT_FAILED = 1  # verification or invariant check failed
EXIT_INVALID = 2  # invalid config or construction precondition


# ===== Logging =====
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
DEFAULT_LOG_LEVEL = "INFO"


# ===== Artifact Names =====
CONFIG_FILENAME = "config.json"
CURVES_PLOT_FILENAME = "curves.html"
DENSITY_PLOT_FILENAME = "density.html"


# ===== Flag → Config Key =====
# None の値は設定ファイルの値を上書きしません
NET_FLAGS = {
    "net": "net.family",
    "dim": "net.dim",
    "radius": "net.radius",
    "scale": "net.scale",
    "phi": "net.phi",
    "ratio": "net.ratio",
    "schedule_n": "net.schedule_n",
    "extend_tail": "net.extend_tail",
    "reference_scale": "net.reference_scale",
    "sides": "net.sides",
    "psi": "net.psi",
    "c": "net.c",
    "zeta": "net.zeta",
    "n_max": "net.n_max",
}
TOP_LEVEL_FLAGS = ("out", "seed", "suite", "radii", "grid_points")
