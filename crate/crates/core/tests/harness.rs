use supercong::harness::{fixtures_json, gen_fixtures, parse_cases, verify_case_with};
use supercong::report::{exit_code, to_json, to_tsv, TSV_HEADER};
use supercong::{find_case, sweep, verify_case, Check, CheckFilter, HarnessConfig, SkipReason, Verdict};

fn only(list: &str) -> HarnessConfig {
    HarnessConfig { checks: CheckFilter::parse(list).unwrap(), ..Default::default() }
}

#[test]
fn verify_case_examples() {
    let r = verify_case(find_case("1/2,1/2").unwrap(), 7);
    assert!(!r.is_empty());
    assert!(r.iter().all(|x| x.verdict != Verdict::Fail), "{r:#?}");
    let sc = r.iter().find(|x| x.check == Check::Supercongruence).unwrap();
    assert_eq!((sc.lhs_residue, sc.rhs_residue, sc.modulus), (24, 24, 343));
    assert_eq!(sc.verdict, Verdict::Pass);
    let hecke: Vec<_> = r.iter().filter(|x| x.check == Check::Hecke).collect();
    assert_eq!(hecke.len(), 2);

    let r = verify_case(find_case("1/3,1/4").unwrap(), 7);
    let sc = r.iter().find(|x| x.check == Check::Supercongruence).unwrap();
    assert_eq!(sc.lhs_residue, 20);
    assert_eq!(r.iter().find(|x| x.check == Check::Cm).unwrap().verdict, Verdict::Pass);

    let r = verify_case(find_case("1/5,2/5").unwrap(), 5);
    assert!(r.iter().all(|x| x.verdict == Verdict::Skip(SkipReason::Ramified)));
    let names: Vec<_> = r.iter().map(|x| x.check.to_string()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn skip_reasons() {
    let r = verify_case(find_case("1/2,1/6").unwrap(), 7);
    let haa = r.iter().find(|x| x.check == Check::HaaIdentity).unwrap();
    assert_eq!(haa.verdict, Verdict::Skip(SkipReason::Inapplicable));
    let cm = r.iter().find(|x| x.check == Check::Cm).unwrap();
    assert_eq!(cm.verdict, Verdict::Skip(SkipReason::Inapplicable));

    let cfg = only("oracle_agreement,hecke,dwork");
    let r = verify_case_with(find_case("1/2,1/2").unwrap(), 37, &cfg, None);
    let oracle = r.iter().find(|x| x.check == Check::OracleAgreement).unwrap();
    assert_eq!(oracle.verdict, Verdict::Skip(SkipReason::Budget));
    assert!(r.iter().filter(|x| x.check == Check::Hecke).all(|x| x.verdict == Verdict::Skip(SkipReason::Budget)));
    // 37³ exceeds the default term budget; 37² does not.
    let d33 = r.iter().find(|x| x.check == Check::Dwork(3, 3)).unwrap();
    assert_eq!(d33.verdict, Verdict::Skip(SkipReason::Budget));
    let d22 = r.iter().find(|x| x.check == Check::Dwork(2, 2)).unwrap();
    assert_eq!(d22.verdict, Verdict::Pass);
}

#[test]
fn ramified_sweep_is_all_skip() {
    let cases = parse_cases("all").unwrap();
    let r = sweep(&cases, 2, 5, &HarnessConfig::default()).unwrap();
    assert!(!r.is_empty());
    assert!(r.iter().all(|x| x.verdict == Verdict::Skip(SkipReason::Ramified)));
    assert_eq!(exit_code(&r), 0);
}

#[test]
fn single_check_json() {
    let cases = parse_cases("1/2,1/2").unwrap();
    let r = sweep(&cases, 7, 7, &only("supercongruence")).unwrap();
    assert_eq!(r.len(), 1);
    let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["lhs_residue"], 24);
    assert_eq!(arr[0]["rhs_residue"], 24);
    assert_eq!(arr[0]["modulus"], 343);
    assert_eq!(arr[0]["verdict"], "PASS");
    assert_eq!(arr[0]["check"], "supercongruence");
}

#[test]
fn filters_and_case_parsing() {
    assert_eq!(CheckFilter::parse("all").unwrap(), CheckFilter::All);
    let f = CheckFilter::parse("dwork, hecke").unwrap();
    assert!(f.wants("dwork") && f.wants("hecke") && !f.wants("cm"));
    assert!(CheckFilter::parse("bogus").is_err());
    assert!(CheckFilter::parse(" , ").is_err());

    assert_eq!(parse_cases("all").unwrap().len(), 14);
    assert_eq!(parse_cases("1/3,1/4").unwrap()[0].id(), "1/3,1/4");
    let v: Vec<_> = parse_cases("1/4,1/4; 1; 1/2,1/2").unwrap().iter().map(|c| c.index).collect();
    assert_eq!(v, vec![1, find_case("1/4,1/4").unwrap().index]);
    assert!(parse_cases("1/7,2/7").is_err());
    assert!(parse_cases("").is_err());

    let cases = parse_cases("1/2,1/2").unwrap();
    let r = sweep(&cases, 7, 13, &only("dwork")).unwrap();
    assert!(r.iter().all(|x| matches!(x.check, Check::Dwork(..))));
}

#[test]
fn sweep_rejects_bad_config() {
    let cases = parse_cases("all").unwrap();
    assert!(sweep(&cases, 13, 7, &HarnessConfig::default()).is_err());
    let cfg = HarnessConfig { precision: 5, ..Default::default() };
    assert!(sweep(&cases, 7, 7, &cfg).is_err());
}

#[test]
fn output_is_deterministic() {
    let cases = parse_cases("1/2,1/2;1/3,1/4;1/5,2/5").unwrap();
    let serial = HarnessConfig { jobs: 1, ..Default::default() };
    let parallel = HarnessConfig { jobs: 4, ..Default::default() };
    let a = sweep(&cases, 7, 23, &serial).unwrap();
    let b = sweep(&cases, 7, 23, &parallel).unwrap();
    assert_eq!(to_tsv(&a), to_tsv(&b));
    assert_eq!(to_json(&a), to_json(&b));
    assert!(to_tsv(&a).starts_with(TSV_HEADER));
    let keys: Vec<_> = a.iter().map(|r| (find_case(&r.case_id).unwrap().index, r.p, r.check.to_string())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn no_failures_up_to_41() {
    let cases = parse_cases("all").unwrap();
    let r = sweep(&cases, 7, 41, &HarnessConfig::default()).unwrap();
    let fails: Vec<_> = r.iter().filter(|x| x.is_fail()).collect();
    assert!(fails.is_empty(), "{fails:#?}");
    assert_eq!(exit_code(&r), 0);
}

#[test]
fn fixtures_generation() {
    assert_eq!(gen_fixtures(7, 31).unwrap().len(), 14);
    let all = gen_fixtures(31, 31).unwrap();
    assert_eq!(all.len(), 112);
    assert_eq!(fixtures_json(&all), include_str!("fixtures/oracle_h.json"));
    assert_eq!(fixtures_json(&all), fixtures_json(&gen_fixtures(31, 31).unwrap()));
    assert!(gen_fixtures(37, 31).is_err());
}

#[test]
fn exit_codes() {
    use supercong::CongruenceReport;
    let pass = CongruenceReport::exact("1/2,1/2", 7, Check::Supercongruence, 1, 1);
    let fail = CongruenceReport::exact("1/2,1/2", 7, Check::Supercongruence, 1, 2);
    let warn = CongruenceReport { verdict: Verdict::Warn, ..fail.clone() };
    assert_eq!(fail.verdict, Verdict::Fail);
    assert_eq!(exit_code(std::slice::from_ref(&pass)), 0);
    assert_eq!(exit_code(&[pass.clone(), warn]), 0);
    assert_eq!(exit_code(&[pass, fail]), 1);
}
