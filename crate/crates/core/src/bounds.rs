//! Lower bounds on the optimal worst-case scenario bin count.

use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("lambda {lambda} outside 1..={max} for capacity {capacity}")]
    Lambda { lambda: u32, max: u32, capacity: u32 },
    #[error("size {size} outside 0..={capacity}")]
    Size { size: u32, capacity: u32 },
}

/// Parameter of the Fekete-Schepers function, `1 <= lambda <= W/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DffParam(u32);

impl DffParam {
    pub fn new(lambda: u32, capacity: u32) -> Result<Self, BoundsError> {
        let max = capacity / 2;
        if lambda == 0 || lambda > max {
            return Err(BoundsError::Lambda {
                lambda,
                max,
                capacity,
            });
        }
        Ok(DffParam(lambda))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

#[inline]
fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// max_k ceil(sum_{i in S_k} s_i / W).
pub fn lb_continuous(instance: &Instance) -> usize {
    let w = u64::from(instance.capacity());
    (0..instance.num_scenarios())
        .map(|k| ceil_div(instance.scenario_load(k), w) as usize)
        .max()
        .unwrap_or(0)
}

/// Fekete-Schepers dual feasible function on the absolute size scale.
pub fn dff_fekete(size: u32, lambda: DffParam, capacity: u32) -> Result<u32, BoundsError> {
    if size > capacity {
        return Err(BoundsError::Size { size, capacity });
    }
    Ok(dff_value(size, lambda.0, capacity))
}

#[inline]
fn dff_value(size: u32, lambda: u32, capacity: u32) -> u32 {
    if size > capacity - lambda {
        capacity
    } else if size <= lambda {
        0
    } else {
        size
    }
}

/// max_k ceil(sum_{i in S_k} f(s_i) / W).
pub fn lb_dff(instance: &Instance, lambda: DffParam) -> usize {
    let w = instance.capacity();
    (0..instance.num_scenarios())
        .map(|k| {
            let total: u64 = instance
                .items_in_scenario(k)
                .iter()
                .map(|&i| u64::from(dff_value(instance.size(i), lambda.0, w)))
                .sum();
            ceil_div(total, u64::from(w)) as usize
        })
        .max()
        .unwrap_or(0)
}

/// Best DFF bound over every lambda, with the smallest maximizing lambda.
/// `None` when `W < 2` (no admissible lambda).
pub fn lb_dff_best(instance: &Instance) -> Option<(usize, DffParam)> {
    let w = instance.capacity();
    let mut best: Option<(usize, DffParam)> = None;
    for lambda in 1..=w / 2 {
        let p = DffParam(lambda);
        let v = lb_dff(instance, p);
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, p));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootBounds {
    pub continuous: usize,
    pub dff: usize,
    pub dff_lambda: Option<DffParam>,
}

impl RootBounds {
    pub fn best(&self) -> usize {
        self.continuous.max(self.dff)
    }
}

pub fn root_bounds(instance: &Instance) -> RootBounds {
    let continuous = lb_continuous(instance);
    let (dff, dff_lambda) = match lb_dff_best(instance) {
        Some((v, p)) => (v, Some(p)),
        None => (0, None),
    };
    RootBounds {
        continuous,
        dff,
        dff_lambda,
    }
}

/// max(lb_continuous, max_lambda lb_dff).
pub fn lb_root(instance: &Instance) -> usize {
    root_bounds(instance).best()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Item;
    use proptest::prelude::*;

    fn one_scenario(sizes: &[u32]) -> Instance {
        Instance::new(
            1,
            100,
            sizes.iter().map(|&s| Item::new(s, vec![0])).collect(),
        )
        .unwrap()
    }

    #[test]
    fn continuous_bound() {
        assert_eq!(lb_continuous(&one_scenario(&[60, 60, 60, 70])), 3);
        let inst = Instance::new(
            2,
            100,
            vec![
                Item::new(90, vec![0, 1]),
                Item::new(80, vec![0]),
                Item::new(80, vec![0]),
            ],
        )
        .unwrap();
        // loads 250 and 90
        assert_eq!(lb_continuous(&inst), 3);
    }

    #[test]
    fn fekete_cases() {
        let l = DffParam::new(10, 100).unwrap();
        assert_eq!(dff_fekete(95, l, 100).unwrap(), 100);
        assert_eq!(dff_fekete(10, l, 100).unwrap(), 0);
        assert_eq!(dff_fekete(50, l, 100).unwrap(), 50);
        assert!(dff_fekete(101, l, 100).is_err());
        assert!(DffParam::new(0, 100).is_err());
        assert!(DffParam::new(51, 100).is_err());
    }

    #[test]
    fn dff_bound_examples() {
        let l = DffParam::new(10, 100).unwrap();
        assert_eq!(lb_dff(&one_scenario(&[95, 95]), l), 2);
        assert_eq!(lb_dff(&one_scenario(&[5, 7, 10]), l), 0);
        assert_eq!(lb_root(&one_scenario(&[5, 7, 10])), 1);
    }

    #[test]
    fn dff_beats_continuous() {
        let inst = one_scenario(&[51, 51, 51]);
        assert_eq!(lb_continuous(&inst), 2);
        assert_eq!(lb_dff(&inst, DffParam::new(49, 100).unwrap()), 2);
        assert_eq!(lb_dff(&inst, DffParam::new(50, 100).unwrap()), 3);
        let rb = root_bounds(&inst);
        assert_eq!(rb.best(), 3);
        assert_eq!(lb_root(&inst), 3);
    }

    #[test]
    fn single_item() {
        assert_eq!(lb_root(&one_scenario(&[1])), 1);
    }

    #[test]
    fn lambda_one_matches_continuous_for_mid_sizes() {
        // sizes in (1, W-1] map to themselves under lambda = 1
        let inst = one_scenario(&[2, 50, 99, 37]);
        assert_eq!(lb_dff(&inst, DffParam::new(1, 100).unwrap()), lb_continuous(&inst));
    }

    proptest! {
        #[test]
        fn dff_is_dual_feasible(
            w in 2u32..200,
            raw in proptest::collection::vec(0u32..200, 0..12),
            lraw in 1u32..100,
        ) {
            let lambda = DffParam::new(1 + lraw % (w / 2), w).unwrap();
            // keep a prefix whose total fits into W
            let mut total = 0u32;
            let mut mapped = 0u32;
            for s in raw {
                let s = s % (w + 1);
                if total + s > w { break; }
                total += s;
                mapped += dff_fekete(s, lambda, w).unwrap();
            }
            prop_assert!(mapped <= w);
        }
    }
}
