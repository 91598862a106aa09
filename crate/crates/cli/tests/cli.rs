use std::path::PathBuf;
use std::process::{Command, Output};

fn pcforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcforge"))
        .args(args)
        .env_remove("PCFORGE_MAX_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pcforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn statuses(report: &str) -> Vec<(String, String)> {
    report
        .lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            let status = it.next()?;
            ["PASS", "FAIL", "SKIP", "ABSENT", "ISO", "NON-ISO"]
                .contains(&status)
                .then(|| (status.to_string(), it.next().unwrap().to_string()))
        })
        .collect()
}

#[test]
fn quotient_freeprod_3_4_is_h() {
    let o = pcforge(&["quotient", "freeprod", "3", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("tower p=3"));
    assert!(text.contains("pcp p=3 n=5"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n=4: order 3^5"));
}

#[test]
fn quotient_writes_file_and_p2_is_fine() {
    let path = scratch("free23.tower");
    let o = pcforge(&["quotient", "free", "2", "3", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().contains("pcp p=2 n=5"));
    // A tower file is a valid group argument.
    let o = pcforge(&["series", path.to_str().unwrap()]);
    assert!(stdout(&o).contains("series.lambda"));
}

#[test]
fn quotient_from_relators() {
    let o = pcforge(&["quotient", "relators", "5", "2", "--relators", "x^5,y^5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("pcp p=5 n=2"));
    let o = pcforge(&["quotient", "relators", "5", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn beauville_h_paper_construction() {
    let o = pcforge(&["beauville", "h", "--paper-construction"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(statuses(&s), [("PASS".to_string(), "beauville.check".to_string())]);
    assert!(s.contains("CERT beauville.check verdict true"));
}

#[test]
fn beauville_c3xc3_search_is_absent() {
    let path = scratch("c3c3.pcp");
    std::fs::write(&path, "pcp p=3 n=2\nw 1 1\nw 2 1\npow 1 = 1\npow 2 = 1\n").unwrap();
    let o = pcforge(&["beauville", path.to_str().unwrap(), "--search"]);
    assert!(o.status.success());
    assert_eq!(statuses(&stdout(&o))[0].0, "ABSENT");
}

#[test]
fn beauville_pairs_and_certificate_replay() {
    let o = pcforge(&["--format", "json-lines", "beauville", "free:5:3", "--pairs", "u,v;uv2,uv4"]);
    assert!(o.status.success());
    let recs: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let check = recs.iter().find(|r| r["id"] == "beauville.check").unwrap();
    assert_eq!(check["status"], "PASS");
    let cert = check["certificate"].as_str().unwrap();
    let path = scratch("free53.cert");
    std::fs::write(&path, cert).unwrap();
    let o = pcforge(&["beauville", "--verify", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(statuses(&stdout(&o))[0].0, "PASS");

    // A tampered verdict must not re-verify.
    std::fs::write(&path, cert.replace("verdict true", "verdict false")).unwrap();
    let o = pcforge(&["beauville", "--verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn beauville_bad_pairs_fail() {
    // u, v and u, v share everything.
    let o = pcforge(&["beauville", "free:5:2", "--pairs", "u,v;u,v"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("# "));
}

#[test]
fn reproduce_thm_a_passes_and_replays() {
    let a = pcforge(&["reproduce", "thmA"]);
    assert!(a.status.success());
    let s = stdout(&a);
    let st = statuses(&s);
    assert!(st.iter().any(|(s, id)| s == "ABSENT" && id == "thmA.absent.free.p3.n3"));
    assert!(st.iter().any(|(s, id)| s == "PASS" && id.starts_with("thmA.structure.free.p5.n3")));
    assert!(st.iter().all(|(s, _)| s != "FAIL"));
    let b = pcforge(&["reproduce", "thmA"]);
    assert_eq!(s, stdout(&b));
}

#[test]
fn reproduce_thm35_iso_then_non_iso() {
    let o = pcforge(&["reproduce", "thm3.5"]);
    assert!(o.status.success());
    let st = statuses(&stdout(&o));
    assert!(st.contains(&("ISO".into(), "thm3.5.iso.order3^5".into())));
    assert!(st.iter().any(|(s, _)| s == "NON-ISO"));
}

#[test]
fn reproduce_lemma22_reports_p2_failures() {
    let o = pcforge(&["reproduce", "lemma2.2"]);
    assert_eq!(o.status.code(), Some(1));
    let st = statuses(&stdout(&o));
    let failed: Vec<&String> = st.iter().filter(|(s, _)| s == "FAIL").map(|(_, id)| id).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|id| id.starts_with("lemma2.2.hp.") && id.contains(".p2.")));
}

#[test]
fn reproduce_unknown_section_errors() {
    let o = pcforge(&["reproduce", "thm9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn timings_only_on_request() {
    let plain = stdout(&pcforge(&["reproduce", "catanese"]));
    assert!(plain.lines().any(|l| l == "# section catanese"));
    let timed = stdout(&pcforge(&["--timings", "reproduce", "catanese"]));
    assert!(timed.lines().any(|l| l.starts_with("# section catanese (")));
}

#[test]
fn max_order_env_turns_into_skips() {
    let o = Command::new(env!("CARGO_BIN_EXE_pcforge"))
        .args(["series", "free:3:3"])
        .env("PCFORGE_MAX_ORDER", "100")
        .output()
        .unwrap();
    assert!(o.status.success());
    let st = statuses(&stdout(&o));
    assert!(st.contains(&("SKIP".into(), "series.hall-petrescu".into())));
    assert!(st.contains(&("PASS".into(), "series.lambda".into())));
}

#[test]
fn nottingham_series_arithmetic() {
    let o = pcforge(&["nottingham", "invert", "t + t^2", "--p", "3", "--k", "4"]);
    assert_eq!(stdout(&o).trim(), "t + 2*t^2 + 2*t^3 + t^4 (mod t^5, p=3)");
    let o = pcforge(&["nottingham", "compose", "t+t^2 (mod t^6, p=3)", "t+t^3 (mod t^6, p=3)"]);
    assert_eq!(stdout(&o).trim(), "t + t^2 + t^3 + 2*t^4 (mod t^6, p=3)");
    let o = pcforge(&["nottingham", "power", "3", "10", "4"]);
    assert_eq!(statuses(&stdout(&o))[0].0, "SKIP");
}

#[test]
fn maxclass_report() {
    let o = pcforge(&["maxclass", "5", "4", "--pc"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("pcp p=5 n=4"));
    assert!(statuses(&s).iter().all(|(st, _)| st == "PASS"));
}

#[test]
fn series_on_a_large_stage_skips_table_checks() {
    let o = pcforge(&["series", "free:3:4", "--samples", "50"]);
    assert!(o.status.success());
    let st = statuses(&stdout(&o));
    assert!(st.contains(&("SKIP".into(), "series.easterfield".into())));
    assert!(st.contains(&("PASS".into(), "series.hall-petrescu".into())));
}
