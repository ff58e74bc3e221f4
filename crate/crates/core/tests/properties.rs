mod support;

const SEEDS: [u64; 3] = [1, 2024, 0x5eed];

#[test]
fn invariants_hold_under_three_seeds() {
    for seed in SEEDS {
        for (name, check) in support::SUITES {
            if let Err(e) = check(seed) {
                panic!("{name} (seed {seed}): {e}");
            }
        }
    }
}
