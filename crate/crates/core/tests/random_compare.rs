//! Classical and global counts agree on random small instances.
//! Seeded by `POSTNIKOV_SEED` when set.

use postnikov_core::classify::GroupDegree;
use postnikov_core::lifts::compare;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng() -> ChaCha8Rng {
    let seed = std::env::var("POSTNIKOV_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x5EED_2026);
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn compare_agrees_on_random_instances() {
    let mut rng = rng();
    let mut checked = 0;
    while checked < 6 {
        let m = rng.gen_range(2..=3);
        let n = rng.gen_range(m + 1..=5);
        let r = rng.gen_range(n + 1..=7);
        let (a, b, c) = (
            GroupDegree::new(rng.gen_range(1..=2), m),
            GroupDegree::new(rng.gen_range(1..=2), n),
            GroupDegree::new(1, r),
        );
        let report = match compare(a, b, c, false) {
            Ok(report) => report,
            Err(postnikov_core::Error::TooLarge(_)) => continue,
            Err(e) => panic!("{a} {b} {c}: {e}"),
        };
        for row in &report.rows {
            assert!(row.equal, "{a} {b} {c} k1 = {}: {} vs {}", row.k1, row.classical, row.global);
            if let Some(k) = row.kunneth {
                assert_eq!(k, row.global, "{a} {b} {c}");
            }
        }
        checked += 1;
    }
}
