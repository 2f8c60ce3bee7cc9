use std::path::Path;
use std::process::{Command, Output};

use bergman_core::cli::{read_csv, read_json};

fn bergman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn experiment_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "lp.cfg",
        "experiment = lp-identities\nweights = [std:alpha=0.5, log:beta=3]\npairs = 6\ndegree = 12\nmax_order = 2\nseed = 11\n",
    );
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = bergman(&["experiment", "--config", &cfg, "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let rows = read_csv(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.seed == Some(11) && r.pass));
}

#[test]
fn different_seeds_change_the_inputs() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            dir.path(),
            "c.cfg",
            &format!("experiment = lp-identities\nweights = [std:alpha=1]\npairs = 3\ndegree = 8\nmax_order = 1\nseed = {seed}\n"),
        );
        bergman(&["experiment", "--config", &cfg]).stdout
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn json_output_round_trips() {
    let o = bergman(&["experiment", "--name", "decay-curve", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = read_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let last = rows.last().unwrap();
    assert_eq!(last.metric, "fraction_of_max");
    assert!(last.pass && last.value <= 0.01);
    assert!(rows.iter().all(|r| r.wall_time_s.is_none()));
}

#[test]
fn timing_column_is_opt_in() {
    let plain = bergman(&["experiment", "--name", "decay-curve"]);
    let timed = bergman(&["experiment", "--name", "decay-curve", "--timing"]);
    let header = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().next().unwrap().to_string();
    assert_eq!(header(&plain), "experiment,case,metric,value,contract,pass,seed");
    assert_eq!(header(&timed), "experiment,case,metric,value,contract,pass,seed,wall_time_s");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bergman(&["experiment", "--name", "nope"]).status.code(), Some(2));

    let empty = config(dir.path(), "empty.cfg", "experiment = moments-identities\nweights = []\n");
    let o = bergman(&["experiment", "--config", &empty]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty"));

    let unknown_key = config(dir.path(), "k.cfg", "experiment = decay-curve\ncolour = blue\n");
    assert_eq!(bergman(&["experiment", "--config", &unknown_key]).status.code(), Some(3));
    let bad_tol = config(dir.path(), "t.cfg", "experiment = decay-curve\ntol = 0\n");
    assert_eq!(bergman(&["experiment", "--config", &bad_tol]).status.code(), Some(3));
    let missing = dir.path().join("absent.cfg");
    assert_eq!(bergman(&["experiment", "--config", missing.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(bergman(&["moments", "--weight", "std:beta=1"]).status.code(), Some(3));
    assert_eq!(bergman(&["no-such-subcommand"]).status.code(), Some(3));
    assert_eq!(bergman(&["--version"]).status.code(), Some(0));
}

#[test]
fn contract_failures_exit_one_and_still_emit_rows() {
    let dir = tempfile::tempdir().unwrap();
    // a bound below rounding level cannot hold
    let cfg = config(
        dir.path(),
        "strict.cfg",
        "experiment = moments-identities\nweights = [std:alpha=1.5]\ndegree = 10\ntol = 1e-300\n",
    );
    let o = bergman(&["experiment", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let rows = read_csv(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 22);
    assert!(rows.iter().any(|r| !r.pass));
}

#[test]
fn uncomputable_cases_become_failed_rows() {
    // pre-images need α > 0; each weight yields one failed row
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "neg.cfg",
        "experiment = decay-curve\nweights = [std:alpha=0, std:alpha=1]\nalphas = [-1]\n",
    );
    let o = bergman(&["experiment", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let rows = read_csv(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.value.is_nan() && r.contract == "computable" && !r.pass));
}

#[test]
fn subcommand_outputs() {
    let o = bergman(&["kernel-norm", "--j-max", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "|z|,N,M_angles,a1_norm,eight_over_pi_gap");
    let first: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!((first - 1.4652567603824502).abs() < 1e-10);

    let o = bergman(&["classify", "--weight", "log:beta=2", "--K", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["dhat"]["verdict"], true);
    assert_eq!(json["dcheck"]["verdict"], false);

    let o = bergman(&["preimage", "--weight", "std:alpha=1", "--series", "poly:[1,2,3]", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("k,h_k,recovered_k,abs_err\n"));
    for line in text.lines().skip(1) {
        let err: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err < 1e-6, "{line}");
    }

    // the classifier gate refuses a non-doubling weight unless forced
    let args = ["preimage", "--weight", "exp:c=1", "--series", "poly:[0,1]"];
    assert_eq!(bergman(&args).status.code(), Some(1));

    let o = bergman(&["verify-lp", "--weight", "log:beta=2", "--deg", "10", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("identity,trials,min,mean,max,seed\n"));

    let o = bergman(&["moments", "--weight", "zero:[0.3,0.4]:std:alpha=1", "-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 5);
}
