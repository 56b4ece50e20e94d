use crate::bounds::{
    central_box_edges, find_l0, find_n0, ln_disconnection_lower_bound, stack_series, BoundsRow,
    BoundsTable,
};
use crate::environment::{MomentFunctions, Phi, RadiusDistribution, RadiusLaw};
use crate::error::Result;
use crate::graph::GraphSpec;

/// Inputs of the `bounds` verb.
#[derive(Debug, Clone)]
pub struct BoundsRequest {
    pub spec: GraphSpec,
    pub law: RadiusLaw,
    /// Decay rate `c` of the subcritical two-point function.
    pub decay_rate: f64,
    /// Reinforced opening probability for the disconnection bound.
    pub q: f64,
    /// Level the entropy series must reach when searching `n0`.
    pub target: f64,
    pub cutoff: u64,
}

/// Evaluates every bound for both growth constants (the fitted one and
/// `ln` of the maximal degree). Bounds whose hypotheses fail are skipped and
/// explained in the returned notes.
pub fn bounds_table(req: &BoundsRequest) -> Result<(BoundsTable, Vec<String>)> {
    let dist = RadiusDistribution::new(req.law)?;
    let graph = req.spec.kind().to_string();
    let law = req.law.to_string();
    let mut table = BoundsTable::default();
    let mut notes = Vec::new();
    let row = |quantity: &str, c_g: f64, threshold: Option<u64>, value: f64, tail: f64, cutoff: Option<u64>| BoundsRow {
        quantity: quantity.into(),
        graph: graph.clone(),
        law: law.clone(),
        decay_rate: req.decay_rate,
        growth_constant: c_g,
        threshold,
        value,
        tail,
        cutoff,
    };

    let mut constants = vec![req.spec.growth_constant()];
    let crude = req.spec.degree_growth_constant();
    if crude != constants[0] {
        constants.push(crude);
    }

    match MomentFunctions::new(&dist) {
        Ok(mf) => {
            for &c_g in &constants {
                match find_n0(req.decay_rate, c_g, &mf, req.target, req.cutoff) {
                    Ok((n0, series)) => {
                        table.push(row("n0", c_g, Some(n0), series.value, series.tail, Some(series.cutoff)));
                        let edges = central_box_edges(&req.spec, &mf, n0);
                        let ln_bound = ln_disconnection_lower_bound(req.q, edges)?;
                        let threshold = u64::try_from(edges).ok();
                        table.push(row("ln_disconnection", c_g, threshold, ln_bound, 0.0, None));
                    }
                    Err(e) => notes.push(format!("n0 with growth constant {c_g}: {e}")),
                }
            }
        }
        Err(e) => notes.push(format!("overlap bounds skipped: {e}")),
    }

    let phi = Phi::new(&req.spec, req.decay_rate)?;
    let level = phi.level_floor(&dist);
    match stack_series(&phi, req.decay_rate, level, &req.spec, req.cutoff) {
        Ok(s) => {
            table.push(row("stack_series", phi.alpha(), Some(level), s.value, s.tail, Some(s.cutoff)));
            match find_l0(&dist, &phi, req.decay_rate, &req.spec, level, req.cutoff) {
                Ok(choice) => {
                    table.push(row("l0", phi.alpha(), Some(choice.l0), choice.product, s.tail, Some(s.cutoff)));
                }
                Err(e) => notes.push(format!("l0: {e}")),
            }
        }
        Err(e) => notes.push(format!("stack series: {e}")),
    }
    Ok((table, notes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_lattice_table_has_every_quantity() {
        let req = BoundsRequest {
            spec: GraphSpec::lattice(1).unwrap(),
            law: RadiusLaw::Geometric { theta: 0.5 },
            decay_rate: 0.65,
            q: 0.9,
            target: 0.5,
            cutoff: 1 << 22,
        };
        let (table, notes) = bounds_table(&req).unwrap();
        let names: Vec<&str> = table.rows.iter().map(|r| r.quantity.as_str()).collect();
        assert!(names.contains(&"n0"), "{names:?} {notes:?}");
        assert!(names.contains(&"ln_disconnection"));
        assert!(names.contains(&"stack_series"));
    }

    #[test]
    fn infinite_mean_skips_overlap_bounds() {
        let req = BoundsRequest {
            spec: GraphSpec::lattice(1).unwrap(),
            law: RadiusLaw::PowerTail { exponent: 1.5, cap: 1000 },
            decay_rate: 0.65,
            q: 0.9,
            target: 0.5,
            cutoff: 1 << 20,
        };
        let (table, notes) = bounds_table(&req).unwrap();
        assert!(table.rows.iter().all(|r| r.quantity != "n0"));
        assert!(!notes.is_empty());
    }
}
