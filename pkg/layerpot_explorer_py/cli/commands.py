import logging

import numpy as np
import pandas as pd

from layerpot_explorer_py.cli.verify_suite import run_verify_suite
from layerpot_explorer_py.export.csv_export import companion_path, save_dataframe
from layerpot_explorer_py.perforated.config import PerforatedConfig, check_epsilon
from layerpot_explorer_py.perforated.truncation import (
    STUDY_COLUMNS, equivalence_study, summarize_truncation, truncation_study,
)
from layerpot_explorer_py.shape.fd_study import calderon_sweep, shape_fd_study

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2


def cmd_verify(session, out):
    """
    Runs the operator identity suite and writes the (check, value, tolerance, passed) report.

    Returns:
        int: 0 if every check passed, 1 otherwise.
    """
    report = run_verify_suite(session["curve"], session["N"], session["seed"])
    save_dataframe(report, out, "Verification report", header_lines=[f"seed={session['seed']}"])
    failed = report.loc[~report["passed"], "check"].tolist()
    if failed:
        print(f"❌ {len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_shape_study(session, out):
    """
    Runs the finite-difference shape study and the Calderon residual sweep.

    Writes the study table to `out` and the sweep to `<stem>_calderon.csv`.

    Returns:
        int: 0 (the study reports orders, it has no pass/fail criterion).
    """
    density = np.ones(session["N"]) if session["density"] == "ones" else None
    report = shape_fd_study(session["kind"], session["phi"], session["direction"], session["t_list"],
                            session["N"], density=density, taylor_order=session["taylor_order"])
    save_dataframe(report.table, out, f"Shape study of {session['kind']}",
                   header_lines=[f"central_slope={report.central_slope:.6g}",
                                 f"taylor_slope={report.taylor_slope:.6g}"])
    sweep = calderon_sweep(session["phi"], session["calderon_N"], session["band"])
    save_dataframe(sweep, companion_path(out, "calderon"), "Calderon residual sweep",
                   header_lines=[f"band={session['band']}"])
    return EXIT_OK


def cmd_perforation_study(session, out):
    """
    Runs the truncation study for every configured (kind, corner) and the block/direct
    equivalence check.

    Writes the per-cell table to `out`, one verdict per (kind, corner, K) to
    `<stem>_summary.csv` and the equivalence table to `<stem>_equivalence.csv`.

    Returns:
        int: 0 if every slope and every equivalence check passed, 1 otherwise.

    Raises:
        EpsilonRangeError: If some epsilon is not admissible, before any study work is done.
    """
    cfg = PerforatedConfig(session["outer"], session["inner"], session["N_outer"], session["N_inner"])
    for epsilon in session["epsilon_list"] + session["equivalence_epsilons"]:
        check_epsilon(epsilon, cfg.epsilon_bound)
    logger.info("Perforation study with epsilon_max = %.6g.", cfg.epsilon_bound)

    tables = [truncation_study(kind, corner, session["K_list"], session["epsilon_list"], cfg, session["probe"])
              for kind in session["kinds"] for corner in session["corners"]]
    table = pd.concat(tables, ignore_index=True) if tables else pd.DataFrame(columns=STUDY_COLUMNS)
    summary = summarize_truncation(table)
    equivalence = equivalence_study(session["kinds"], session["equivalence_epsilons"], cfg)

    save_dataframe(table, out, "Truncation study")
    save_dataframe(summary, companion_path(out, "summary"), "Truncation summary")
    save_dataframe(equivalence, companion_path(out, "equivalence"), "Block/direct equivalence")

    failed = int((~summary["passed"]).sum() + (~equivalence["passed"]).sum())
    if failed:
        print(f"❌ {failed} perforation check(s) failed.")
        return EXIT_CHECK_FAILED
    return EXIT_OK


COMMAND_HANDLERS = {
    "verify": cmd_verify,
    "shape-study": cmd_shape_study,
    "perforation-study": cmd_perforation_study,
}
