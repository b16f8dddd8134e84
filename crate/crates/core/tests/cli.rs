use std::process::Command;

fn wittop(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wittop"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).trim().to_string(),
        String::from_utf8_lossy(&out.stderr).trim().to_string(),
    )
}

#[test]
fn documented_examples() {
    assert_eq!(
        wittop(&["witt", "add", "--p", "2", "--len", "2", "[1;0]", "[1;0]"]),
        (0, "[0;1]".into(), String::new())
    );
    assert_eq!(
        wittop(&["embed", "--p", "2", "--len", "2", "[T;1]"]),
        (0, "T1^2 + 2".into(), String::new())
    );
    assert_eq!(
        wittop(&["op", "apply", "--p", "2", "--len", "2", "{d1}_{1/2}", "[T^2;0]"]),
        (0, "[0;0]".into(), String::new())
    );
}

#[test]
fn arithmetic_commands() {
    assert_eq!(wittop(&["witt", "mul", "--p", "3", "--len", "2", "[T;0]", "[T;0]"]).1, "[T1^2;0]");
    assert_eq!(wittop(&["witt", "frob", "--p", "2", "--len", "2", "[T;1]"]).1, "[T1^2;1]");
    assert_eq!(wittop(&["witt", "versch", "--p", "2", "--len", "3", "[T;1;T]"]).1, "[0;T1;1]");
    assert_eq!(wittop(&["witt", "restrict", "--p", "2", "--len", "3", "--to", "2", "[T;1;T]"]).1, "[T1;1]");
    assert_eq!(wittop(&["decode", "--p", "2", "--len", "2", "T^2+2"]).1, "[T1;1]");
    assert_eq!(wittop(&["member", "--p", "2", "--len", "2", "T"]).1, "false");
    assert_eq!(wittop(&["hs", "lift", "--p", "2", "--len", "2", "--hs", "d1", "--j", "2", "[T^2;0]"]).1, "[0;T1^2]");
}

#[test]
fn exit_codes() {
    // usage and parse errors
    assert_eq!(wittop(&["witt", "add", "--p", "4", "[1]", "[1]"]).0, 2);
    assert_eq!(wittop(&["witt", "add", "--p", "2", "[1;", "[1]"]).0, 2);
    assert_eq!(wittop(&["verify", "nonsense"]).0, 2);
    assert_eq!(wittop(&["frobnicate"]).0, 2);
    // domain failure
    let (code, _, err) = wittop(&[
        "phi", "gamma", "--p", "2", "--len", "3", "--max-deg", "4", "--lift1", "", "--lift2", "T1->T^2+2*T",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("does not converge"), "{err}");
    let (code, out, _) = wittop(&[
        "phi", "gamma", "--p", "2", "--len", "3", "--max-deg", "4", "--level", "1", "--lift1", "", "--lift2",
        "T1->T^2+2*T",
    ]);
    assert_eq!(code, 0);
    assert!(out.ends_with("yes"), "{out}");
}

#[test]
fn json_output() {
    let (code, out, _) = wittop(&["--json", "-", "witt", "add", "--p", "2", "--len", "2", "[1;0]", "[1;0]"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["output"], "[0;1]");
}

#[test]
fn verify_reports_and_replays() {
    let args = ["verify", "identities", "--p", "2", "--len", "2", "--samples", "3", "--json", "-"];
    let (code, out, _) = wittop(&args);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    assert_eq!(wittop(&args).1, out, "reports are deterministic");

    let (code, out, _) = wittop(&["verify", "identities", "--p", "2", "--len", "2", "--samples", "3", "--inject-fault"]);
    assert_eq!(code, 1);
    let replay = out
        .lines()
        .find_map(|l| l.trim().strip_prefix("replay: "))
        .expect("failure carries a replay line");
    let argv: Vec<&str> = replay.split_whitespace().skip(1).collect();
    assert_eq!(wittop(&argv).0, 1, "replay reproduces the failure: {replay}");
}
