use nuca::decide::{decide, DecideOptions};
use nuca::oracle::{oracle_verdict, KERNEL_WINDOW_R};
use nuca::suite::{curated_suite, SIX};

#[test]
fn curated_verdicts_match_expectations() {
    let opts = DecideOptions::default();
    let mut bad = vec![];
    for case in curated_suite() {
        for (prop, want) in SIX.iter().zip(case.expect) {
            let got = match decide(&case.spec, *prop, &opts) {
                Ok(r) => Some(r.verdict),
                Err(e) if matches!(e, nuca::NucaError::Unsupported(_)) => None,
                Err(e) => {
                    bad.push(format!("{} {prop}: error {e}", case.name));
                    continue;
                }
            };
            if got != want {
                bad.push(format!("{} {prop}: got {got:?} want {want:?}", case.name));
            }
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn curated_verdicts_match_oracles() {
    let opts = DecideOptions::default();
    let mut bad = vec![];
    for case in curated_suite() {
        for prop in SIX {
            let (d, o) = (decide(&case.spec, prop, &opts), oracle_verdict(&case.spec, prop, KERNEL_WINDOW_R));
            let (d, o) = match (d, o) {
                (Ok(d), Ok(o)) => (d, o),
                (Err(_), Err(_)) => continue,
                (d, o) => {
                    bad.push(format!("{} {prop}: decide {:?} oracle {:?}", case.name, d.map(|r| r.verdict), o));
                    continue;
                }
            };
            if d.verdict != o.verdict {
                bad.push(format!("{} {prop}: decide {} oracle {}", case.name, d.verdict, o.verdict));
            }
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}
