
def _run_params(**extra_options):
    """key=value positionals plus --config FILE and --out PATH."""
    options = {"--config": "config_file", "--out": "out"}
    options.update(extra_options)
    defaults = {"pairs": [], "config_file": None, "out": None}
    for spec in extra_options.values():
        if isinstance(spec, dict):
            defaults[spec["to"]] = False
        else:
            defaults[spec] = None
    return {"positionals": ["pairs*"], "options": options, "defaults": defaults}


COMMANDS = {
    "help": {
        "type": "default",
        "aliases": ["?", "-h", "--help"],
        "description": "Show available commands.",
        "usage": "help",
        "require_args": False,
        "numerical": False,
        "params": [],
        "handler": "core.presenters.help.help_handler",
        "messages": None
    },


    "exact1d": {
        "type": "default",
        "aliases": ["1d"],
        "description": "Tabulate the half-line profile v_M (v0 for M=0) to CSV.",
        "usage": "exact1d p=<p> gamma=<gamma> [M=<M>] [t_max=<t>] [points=<n>] [--config FILE] [--out PATH]",
        "require_args": True,
        "numerical": True,
        "params": _run_params(),
        "handler": "core.handlers.exact1d.exact1d_handler",
        "messages": {
            "success":     "exact1d.written",
            "nonexistent": "exact1d.nonexistent"
        }
    },
    "solve": {
        "type": "default",
        "aliases": ["strip"],
        "description": "Solve the truncated strip problem and dump the field plus a gnuplot script.",
        "usage": "solve p=<p> gamma=<gamma> [N=1|2] [nx=<n>] [ny=<n>] [top=v0|const|vM|neumann] ... [--config FILE] [--out PATH]",
        "require_args": True,
        "numerical": True,
        "params": _run_params(),
        "handler": "core.handlers.solve.solve_handler",
        "messages": {
            "success": "solve.written",
            "solve_failed": "solve.failed",
            "positivity_lost": "solve.failed"
        }
    },
    "sweep": {
        "type": "default",
        "aliases": [],
        "description": "Run exact1d over a grid of (p, gamma, M) in parallel.",
        "usage": "sweep p=<p1,p2,..> gamma=<g1,g2,..> M=<M1,M2,..> [workers=<n>] [--config FILE] [--out DIR]",
        "require_args": True,
        "numerical": True,
        "params": _run_params(),
        "handler": "core.handlers.sweep.sweep_handler",
        "messages": {
            "success": "sweep.done",
            "partial": "sweep.partial"
        }
    },
    "eigen": {
        "type": "default",
        "aliases": ["eig"],
        "description": "First Dirichlet eigenpair of the radial p-Laplacian on a ball.",
        "usage": "eigen N=<N> p=<p> [R=<radius>] [tol=<tol>] [samples=<n>] [--config FILE] [--out PATH]",
        "require_args": True,
        "numerical": True,
        "params": _run_params(),
        "handler": "core.handlers.eigen.eigen_handler",
        "messages": {
            "success": "eigen.written"
        }
    },
    "barrier": {
        "type": "default",
        "aliases": ["bar"],
        "description": "Build and validate a sub/supersolution barrier and dump its profile.",
        "usage": "barrier kind=wmu|eigen_power|linear_lower|annulus|v0_shift p=<p> ... [--config FILE] [--out PATH]",
        "require_args": True,
        "numerical": True,
        "params": _run_params(),
        "handler": "core.handlers.barrier.barrier_handler",
        "messages": {
            "success": "barrier.valid",
            "invalid": "barrier.invalid"
        }
    },
    "check": {
        "type": "default",
        "aliases": ["qa", "selftest"],
        "description": "Run the acceptance suite: one line per criterion, nonzero exit on failure.",
        "usage": "check [tol_scale=<x>] [--only ID[,ID]] [--list] [--config FILE]",
        "require_args": False,
        "numerical": True,
        "params": _run_params(**{"--list": {"to": "list_only", "flag": True}, "--only": "only"}),
        "handler": "core.services.check.check_handler",
        "messages": {
            "success": "check.success",
            "partial": "check.partial",
            "listed": "check.listed"
        }
    },
}
