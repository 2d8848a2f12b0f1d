from decoy_akg.cli import CSV_HEADER, EXIT_CONFIG, EXIT_OK, load_params_file, main


def _run(args):
    return main([str(a) for a in args])


def test_run_writes_schema_and_is_deterministic(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    args = [
        "run",
        "--scenario", "k2",
        "--l-min", "220",
        "--l-max", "224",
        "--l-step", "2",
        "--out",
    ]
    assert _run(args + [out_a]) == EXIT_OK
    assert _run(args + [out_b]) == EXIT_OK
    scenario_file = out_a / "k2_forward_pd-zero.csv"
    combined = out_a / "combined.csv"
    assert scenario_file.exists() and combined.exists()
    lines = scenario_file.read_text().splitlines()
    assert lines[0].startswith("# scenario=k2")
    assert "theta=" in lines[0]
    assert lines[1] == CSV_HEADER
    assert len(lines) == 2 + 3  # three distances
    first = lines[2].split(",")
    assert first[0] == "k2" and first[1] == "220"
    assert first[7] == "2" and first[8] == "1"  # source-j diagnostics
    # byte-identical re-run
    for name in ("k2_forward_pd-zero.csv", "combined.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_run_multiple_scenarios_combined(tmp_path):
    args = [
        "run",
        "--scenario", "k2,universal",
        "--l-min", "200", "--l-max", "200", "--l-step", "1",
        "--out", tmp_path,
    ]
    assert _run(args) == EXIT_OK
    combined = (tmp_path / "combined.csv").read_text().splitlines()
    assert combined[0] == CSV_HEADER
    names = {line.split(",")[0] for line in combined[1:]}
    assert names == {"k2", "universal"}


def test_gnuplot_format_blocks(tmp_path):
    args = [
        "run",
        "--scenario", "k2,universal",
        "--l-min", "200", "--l-max", "201", "--l-step", "1",
        "--format", "gnuplot-data",
        "--out", tmp_path,
    ]
    assert _run(args) == EXIT_OK
    data = (tmp_path / "combined.dat").read_text()
    blocks = [b for b in data.split("\n\n") if b.strip()]
    assert len(blocks) == 2  # one block per scenario
    assert (tmp_path / "k2_forward_pd-zero.dat").exists()


def test_custom_scenario_requires_decoys(tmp_path):
    assert _run(["run", "--scenario", "custom", "--out", tmp_path]) == EXIT_CONFIG


def test_bad_decoy_spacing_is_config_error(tmp_path):
    args = ["run", "--scenario", "custom", "--decoys", "0.1,0.15", "--out", tmp_path]
    assert _run(args) == EXIT_CONFIG


def test_empty_range_is_config_error(tmp_path):
    args = ["run", "--scenario", "k2", "--l-min", "10", "--l-max", "0", "--out", tmp_path]
    assert _run(args) == EXIT_CONFIG
    assert not (tmp_path / "combined.csv").exists()


def test_params_file_roundtrip(tmp_path):
    params_file = tmp_path / "channel.cfg"
    params_file.write_text(
        """
        # alternative fiber
        a1 = 0.21
        p0 = 1e-6
        s = 0.025
        """
    )
    params = load_params_file(params_file)
    assert params.a1 == 0.21
    assert params.p0 == 1e-6
    assert params.s == 0.025
    assert params.theta == 0.1  # default preserved
    bad = tmp_path / "bad.cfg"
    bad.write_text("wavelength = 1550\n")
    assert _run(["run", "--scenario", "k2", "--params-file", bad, "--out", tmp_path]) == EXIT_CONFIG


def test_figures_command_writes_datasets(tmp_path):
    args = ["figures", "--l-min", "200", "--l-max", "210", "--l-step", "5", "--out", tmp_path]
    assert _run(args) == EXIT_OK
    for tag in ("forward_pd-zero", "forward_pd-equals-p0", "reverse_pd-equals-p0"):
        assert (tmp_path / f"rates_{tag}" / "combined.csv").exists()
        table = (tmp_path / f"distances_{tag}.csv").read_text().splitlines()
        assert table[0] == "scenario,achievable_km"
        assert len(table) >= 6
    profile = (tmp_path / "optimal_intensity_reverse_pd-equals-p0.csv").read_text().splitlines()
    assert profile[0] == "scenario,L_km,optimal_mu"
