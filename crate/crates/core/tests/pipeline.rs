//! System file to return set to fitted descriptor, with the oracle checked
//! against exact evaluation on the first few orbit points.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use pdml_core::funcfield::{height, RatFunc};
use pdml_core::setalg::{fit_descriptor, FitLimits};
use pdml_core::sunit::{exact_value, AddConstantOptions};
use pdml_core::torusdyn::{orbit, return_set, ScanOptions, System, SystemFile};

const SYSTEM: &str = r#"{"schema":"pdml.system/1","p":3,"generators":["t","t + 1"],
 "map":{"matrix":[["3","0","0"],["0","3","0"],["3","0","3"]],"translation":{"units":[1,1,1],"exponents":[["0","0"],["0","0"],["0","0"]]},
 "shifts":[{"coord":2,"source":1,"shift":"1","exp":"3"}]},
 "start":{"units":[1,1,1],"exponents":[["1","0"],["0","0"],["0","0"]]},
 "equations":["x2 = x3 + 1"],"window":10,"oracle":{"degree":40,"trials":4,"seed":0}}"#;

fn system() -> System {
    serde_json::from_str::<SystemFile>(SYSTEM).unwrap().decode().unwrap()
}

fn scan(sys: &System) -> Vec<u64> {
    let opts = ScanOptions { oracle: sys.oracle, ..Default::default() };
    return_set(&sys.map, &sys.start, &sys.equations, sys.window, &opts).unwrap().members()
}

#[test]
fn return_set_is_the_powers_of_three() {
    assert_eq!(scan(&system()), [1, 3, 9]);
}

#[test]
fn oracle_agrees_with_exact_values() {
    let sys = system();
    let members = scan(&sys);
    let orb = orbit(&sys.map, &sys.start, 5, &AddConstantOptions::default()).unwrap();
    for n in 0..=5u64 {
        let x = exact_value(&orb.basis, &orb.point(n as usize), 1 << 16).unwrap();
        let on_v = x[1] == x[2].add(&RatFunc::one(*x[2].field()));
        assert_eq!(on_v, members.contains(&n), "n = {n}");
        let rec = &orb.records[n as usize];
        for (c, h) in x.iter().zip(&rec.heights) {
            assert_eq!(&height(c), h, "n = {n}");
        }
    }
}

#[test]
fn fitted_descriptor_reproduces_the_window() {
    let sys = system();
    let members: BTreeSet<u64> = scan(&sys).into_iter().collect();
    let top = fit_descriptor(&members, 3, 10, &FitLimits::default()).into_iter().next().unwrap();
    assert_eq!(top.to_string(), "{3^(n1)}");
    let w = top.window(10);
    assert!(w.unknown.is_empty());
    assert_eq!(w.members, members.iter().map(|&n| BigInt::from(n)).collect::<Vec<_>>());
}

#[test]
fn system_file_survives_reencoding() {
    let sys = system();
    let text = serde_json::to_string(&SystemFile::new(&sys)).unwrap();
    let again = serde_json::from_str::<SystemFile>(&text).unwrap().decode().unwrap();
    assert_eq!(scan(&again), scan(&sys));
    assert_eq!(serde_json::to_string(&SystemFile::new(&again)).unwrap(), text);
}
