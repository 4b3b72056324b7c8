//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use korobov_tract::{SequenceFamily, WeightSpec};

pub fn spec(omega: f64, a: &str, b: &str) -> WeightSpec {
    WeightSpec::new(
        omega,
        a.parse::<SequenceFamily>().expect("a family"),
        b.parse::<SequenceFamily>().expect("b family"),
    )
    .expect("valid spec")
}

/// Twelve instances spanning every family kind in both roles.
pub fn corpus() -> Vec<(&'static str, WeightSpec)> {
    vec![
        ("const-one", spec(0.5, "const:c=1", "const:c=1")),
        ("k-linear", spec(0.5, "power:c=1,p=1", "const:c=1")),
        ("sqrt-growth", spec(0.25, "power:c=2,p=0.5", "const:c=1")),
        ("log-slow", spec(0.5, "logpower:c=1,p=1", "const:c=1")),
        ("log-square", spec(0.75, "logpower:c=2,p=2", "const:c=1")),
        ("exp-fast", spec(0.5, "exp:c=1,gamma=0.5", "const:c=1")),
        ("smooth-up", spec(0.5, "const:c=1.5", "power:c=1,p=0.3")),
        ("k-linear-bk", spec(0.5, "power:c=1,p=1", "power:c=1,p=1")),
        ("square-logb", spec(0.6, "power:c=1,p=2", "logpower:c=2,p=1")),
        ("lists", spec(0.5, "list:1,2,2,5", "list:1,1.5,1.25")),
        ("exp-both", spec(0.4, "exp:c=2,gamma=1", "exp:c=1,gamma=0.25")),
        ("list-a", spec(0.7, "list:2,3,4", "const:c=0.8")),
    ]
}

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// A random instance with parameters kept in a range where enumeration and
/// counting stay desk-scale.
pub fn random_spec(rng: &mut ChaCha12Rng) -> WeightSpec {
    let omega = rng.gen_range(0.3..0.75);
    let a = random_family(rng, true);
    let b = random_family(rng, false);
    WeightSpec::new(omega, a, b).expect("generated spec is valid")
}

fn random_family(rng: &mut ChaCha12Rng, role_a: bool) -> SequenceFamily {
    // the b role needs a positive infimum comfortably away from 0 so series
    // truncation converges quickly
    let c_low = if role_a { 0.5 } else { 0.8 };
    match rng.gen_range(0..5u8) {
        0 => SequenceFamily::Constant { c: rng.gen_range(c_low..2.5) },
        1 => SequenceFamily::Power { c: rng.gen_range(c_low..2.0), p: rng.gen_range(0.3..1.5) },
        2 => SequenceFamily::LogPower { c: rng.gen_range(1.2..2.5), p: rng.gen_range(0.5..2.0) },
        3 => SequenceFamily::Exponential {
            c: rng.gen_range(c_low..1.5),
            gamma: rng.gen_range(0.2..0.8),
        },
        _ => {
            let len = rng.gen_range(1..5usize);
            let mut values = Vec::with_capacity(len);
            let mut cur = rng.gen_range(c_low..1.5);
            for _ in 0..len {
                values.push(cur);
                if role_a {
                    cur += rng.gen_range(0.0..1.0);
                } else {
                    cur = rng.gen_range(c_low..2.0);
                }
            }
            SequenceFamily::ExplicitList { values }
        }
    }
}
