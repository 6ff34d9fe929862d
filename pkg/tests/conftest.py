ACCEPTANCE_LABELS = {
    "test_availability_calculus_vs_oracle": "availability calculus vs Monte-Carlo oracle (3 sigma, <60 s)",
    "test_structure_function_table": "3-link structure-function table (8 rows exact)",
    "test_update_formula_identities": "update-formula identities (composition, 1e-12)",
    "test_threshold_gating_zero_protection": "threshold gating: no protection capacity above threshold",
    "test_single_fault_restorability_soundness": "single-fault soundness: 100 prefixes, 22 failures each",
    "test_blocking_probability_trends": "blocking-probability trends across loads and modes",
    "test_conservation_and_deterministic_replay": "conservation and deterministic replay",
    "test_hundred_k_run_performance": "100k-request run under 5 minutes",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            name = getattr(rep, "nodeid", "").rsplit("::", 1)[-1]
            base = name.split("[", 1)[0]
            if base in ACCEPTANCE_LABELS:
                verdict = "PASS" if outcome == "passed" else "FAIL"
                if verdicts.get(base) != "FAIL":
                    verdicts[base] = verdict
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for base, label in ACCEPTANCE_LABELS.items():
            if base in verdicts:
                terminalreporter.write_line(f"{verdicts[base]}  {label}")
