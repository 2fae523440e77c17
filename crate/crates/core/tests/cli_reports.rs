use serde_json::Value;

use satfield::cli::expr::parse_ratfunc;
use satfield::cli::{run, GroupFile};
use satfield::group::DEFAULT_CAP;
use satfield::poly::wedge_vanishes;

fn example(name: &str) -> String {
    format!("{}/../../groups/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn sat(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["satfield".to_string(), "--format".into(), "json".into()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (code, out) = run(&argv);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{out}: {e}")))
}

#[test]
fn shipped_examples_reproduce() {
    let cases = [
        ("swap_f2", "ring", 0, "saturated"),
        ("swap_f2", "field", 1, "not_saturated"),
        ("c3_rot", "ring", 0, "saturated"),
        ("c3_rot", "field", 1, "not_saturated"),
        ("i120", "ring", 0, "saturated"),
        ("i120", "field", 1, "not_saturated"),
        ("a5_gl5", "ring", 0, "saturated"),
        ("a5_gl5", "field", 0, "saturated"),
        ("s3_gl3", "ring", 1, "not_saturated"),
        ("s3_gl3", "field", 1, "not_saturated"),
        ("valentiner", "ring", 0, "saturated"),
        ("valentiner", "field", 0, "saturated"),
        ("icosa_moebius", "field-abstract", 1, "unknown"),
        ("a5_perm", "field-abstract", 1, "unknown"),
    ];
    for (name, cmd, code, status) in cases {
        let path = example(name);
        let (c, v) = sat(&["saturate", cmd, &path]);
        assert_eq!((c, v["result"]["status"].as_str()), (code, Some(status)), "{name} {cmd}: {v}");
    }
    // matrix routes refuse non-matrix groups
    for name in ["icosa_moebius", "a5_perm"] {
        let (c, v) = sat(&["saturate", "field", &example(name)]);
        assert_eq!(c, 2);
        assert!(v["error"].is_string());
    }
}

#[test]
fn reports_repeat_for_a_seed() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed_us");
        v
    };
    for args in [
        vec!["--seed", "7", "saturate", "field"],
        vec!["--seed", "7", "witness"],
        vec!["group", "analyze"],
    ] {
        let mut a = args.clone();
        let path = example("c3_rot");
        a.push(&path);
        let (c1, v1) = sat(&a);
        let (c2, v2) = sat(&a);
        assert_eq!(c1, c2);
        assert_eq!(strip(v1), strip(v2));
    }
}

#[test]
fn printed_witnesses_parse_back() {
    for name in ["swap_f2", "c3_rot", "i120", "s3_gl3"] {
        let path = example(name);
        let lg = GroupFile::load(std::path::Path::new(&path)).unwrap().build(DEFAULT_CAP).unwrap();
        let (_, v) = sat(&["saturate", "field", &path]);
        let w = &v["witness"];
        let n = lg.group.arity();
        let k = &lg.field;
        let phi = parse_ratfunc(w["phi"].as_str().unwrap(), k, n).unwrap();
        let psi = parse_ratfunc(w["psi"].as_str().unwrap(), k, n).unwrap();
        assert_eq!(phi.to_string(), w["phi"].as_str().unwrap());
        assert!(!phi.is_constant());
        assert!(wedge_vanishes(&phi, &psi).unwrap(), "{name}");
        for e in lg.group.elements() {
            assert_eq!(phi.substitute(&e.action()).unwrap(), phi, "{name}");
        }
        assert!(lg.group.elements().iter().any(|e| psi.substitute(&e.action()).unwrap() != psi), "{name}");
    }
}
