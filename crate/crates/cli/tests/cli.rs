use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// A few fixture laws copied under `dir` with a config naming them.
fn workspace(dir: &Path, extra: &str) -> PathBuf {
    for (country, name) in [
        ("jp", "02_trust_deposits.xml"),
        ("jp", "09_guarantees.xml"),
        ("kr", "02_3725.xml"),
        ("fr", "02_89-462.xml"),
    ] {
        fs::create_dir_all(dir.join(country)).unwrap();
        fs::copy(fixtures().join(country).join(name), dir.join(country).join(name)).unwrap();
    }
    let config = format!(
        "run_id = \"cli\"\noutput_dir = \"out\"\n{extra}\n\
         [[sources]]\ncountry = \"JP\"\ndir = \"jp\"\nformat = \"jls\"\n\
         [[sources]]\ncountry = \"KR\"\ndir = \"kr\"\nformat = \"akn\"\n\
         [[sources]]\ncountry = \"FR\"\ndir = \"fr\"\nformat = \"akn\"\n"
    );
    let path = dir.join("lexbridge.toml");
    fs::write(&path, config).unwrap();
    path
}

fn lexbridge(args: &[&str], env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lexbridge"));
    cmd.args(args).env_remove("LEXBRIDGE_SCORER_URL");
    if let Some(url) = env {
        cmd.env("LEXBRIDGE_SCORER_URL", url);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn unused_port_url() -> String {
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    format!("http://127.0.0.1:{port}/score")
}

#[test]
fn all_runs_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let config = workspace(dir.path(), "");
    let out = lexbridge(&["all", "--config", config.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    for f in [
        "corpus.jsonl",
        "vectors.jsonl",
        "correspondences.jsonl",
        "graph/cli.graphml",
        "graph/cli.dot",
        "graph/cli.nodelink",
        "graph/cli.stats.json",
        "provenance/graph.json",
    ] {
        assert!(dir.path().join("out").join(f).is_file(), "{f}");
    }
    assert!(stderr(&out).contains("wrote "));
}

#[test]
fn run_id_flag_names_the_exports() {
    let dir = tempfile::tempdir().unwrap();
    let config = workspace(dir.path(), "");
    let out = lexbridge(
        &["all", "--config", config.to_str().unwrap(), "--run-id", "second"],
        None,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("out/graph/second.graphml").is_file());
    let out = lexbridge(
        &["graph", "--config", config.to_str().unwrap(), "--run-id", "../escape"],
        None,
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn missing_stage_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = workspace(dir.path(), "");
    let out = lexbridge(&["graph", "--config", config.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.lines().any(|l| l.starts_with("ERROR StageInputMissing ")), "{err}");
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = workspace(dir.path(), "[retrieval]\ntopk = 3\n");
    let out = lexbridge(&["convert", "--config", config.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("ERROR ConfigInvalid "), "{}", stderr(&out));
    let out = lexbridge(
        &["convert", "--config", dir.path().join("absent.toml").to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    let out = lexbridge(&["publish", "--config", config.to_str().unwrap()], None);
    assert!(!out.status.success());
}

#[test]
fn scorer_url_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = workspace(
        dir.path(),
        "[rerank]\nscorer = \"remote_service\"\nservice_endpoint = \"http://127.0.0.1:9/configured\"\n",
    );
    let config = config.to_str().unwrap();
    for stage in ["convert", "corpus", "embed"] {
        assert!(lexbridge(&[stage, "--config", config], None).status.success());
    }
    let url = unused_port_url();
    let out = lexbridge(&["link", "--config", config], Some(&url));
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("ERROR ServiceUnreachable "), "{err}");
    assert!(err.contains(&url) && !err.contains("/configured"), "{err}");
    assert!(!dir.path().join("out/correspondences.jsonl").exists());
}
