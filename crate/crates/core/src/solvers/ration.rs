use alloc::vec::Vec;

/// Grants every demand in full when the total fits under `capacity`, otherwise
/// scales all demands by `capacity / total`.
///
/// In the rationed branch the last positive demand absorbs the rounding
/// residue so the grants sum to `capacity`. All-zero demands yield all-zero
/// grants.
pub fn proportional_ration(demands: &[f64], capacity: f64) -> Vec<f64> {
    let total: f64 = demands.iter().sum();
    if total <= capacity {
        return demands.to_vec();
    }
    if total <= 0.0 {
        return alloc::vec![0.0; demands.len()];
    }
    let mut grants: Vec<f64> = demands.iter().map(|x| x * capacity / total).collect();
    if let Some(last) = demands.iter().rposition(|&x| x > 0.0) {
        let others: f64 = grants
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != last)
            .map(|(_, g)| g)
            .sum();
        grants[last] = (capacity - others).clamp(0.0, demands[last]);
    }
    grants
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(proportional_ration(&[2.0, 6.0], 4.0), vec![1.0, 3.0]);
        assert_eq!(proportional_ration(&[2.0, 2.0], 10.0), vec![2.0, 2.0]);
        assert_eq!(proportional_ration(&[0.0, 0.0], 4.0), vec![0.0, 0.0]);
        assert_eq!(proportional_ration(&[0.0, 5.0], 3.0), vec![0.0, 3.0]);
        assert_eq!(proportional_ration(&[], 3.0), Vec::<f64>::new());
    }

    proptest! {
        #[test]
        fn sums_to_capacity_when_rationed(d in prop::collection::vec(0.0f64..50.0, 1..10),
                                          frac in 0.0f64..1.0) {
            let total: f64 = d.iter().sum();
            let cap = total * frac;
            let g = proportional_ration(&d, cap);
            let s: f64 = g.iter().sum();
            if total > cap {
                prop_assert!((s - cap).abs() <= 1e-12 * (1.0 + cap));
            }
            for (gi, di) in g.iter().zip(&d) {
                prop_assert!(*gi >= 0.0 && *gi <= *di);
            }
        }

        #[test]
        fn scale_equivariant(d in prop::collection::vec(0.0f64..50.0, 1..8),
                             cap in 0.0f64..100.0, alpha in 0.01f64..100.0) {
            let base = proportional_ration(&d, cap);
            let scaled_d: Vec<f64> = d.iter().map(|x| x * alpha).collect();
            let scaled = proportional_ration(&scaled_d, cap * alpha);
            for (a, b) in scaled.iter().zip(&base) {
                prop_assert!((a - alpha * b).abs() <= 1e-9 * (1.0 + alpha * b));
            }
        }

        #[test]
        fn never_exceeds_capacity(d in prop::collection::vec(0.0f64..50.0, 0..8), cap in 0.0f64..300.0) {
            let g = proportional_ration(&d, cap);
            let s: f64 = g.iter().sum();
            prop_assert!(s <= cap + 1e-9);
        }
    }
}
