use std::io::Write;

use super::domain::Domain;
use super::field::ScalarField;
use super::point::ComplexPoint;
use crate::error::{Error, Result};

/// Uniform lattice nodes of a bounded domain, anchored at the center of its
/// bounding box so that the center is a node whenever it lies in the domain.
#[derive(Clone, Debug)]
pub struct Grid {
    domain: Domain,
    spacing: f64,
    nodes: Vec<ComplexPoint>,
}

impl Grid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[ComplexPoint] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Keeps the nodes satisfying `keep`; errors if none survive.
    pub fn filter(&self, label: &str, keep: impl Fn(&ComplexPoint) -> bool) -> Result<Grid> {
        let nodes: Vec<_> = self.nodes.iter().filter(|p| keep(p)).cloned().collect();
        if nodes.is_empty() {
            return Err(Error::EmptyGrid {
                domain: format!("{:?} [{label}]", self.domain),
                spacing: self.spacing,
            });
        }
        Ok(Grid {
            domain: self.domain.clone(),
            spacing: self.spacing,
            nodes,
        })
    }

    /// Nodes whose distance to the boundary of `within` exceeds `collar`.
    pub fn with_collar(&self, within: &Domain, collar: f64) -> Result<Grid> {
        self.filter("collar", |p| within.margin(p) > collar)
    }

    pub fn from_nodes(domain: Domain, spacing: f64, nodes: Vec<ComplexPoint>) -> Result<Grid> {
        if nodes.is_empty() {
            return Err(Error::EmptyGrid {
                domain: domain.describe(),
                spacing,
            });
        }
        Ok(Grid {
            domain,
            spacing,
            nodes,
        })
    }

    /// Writes `re_1,im_1,...,re_n,im_n,value` rows for `field` at every node.
    pub fn write_csv<W: Write>(&self, field: &ScalarField, out: W) -> Result<usize, csv::Error> {
        let mut writer = csv::Writer::from_writer(out);
        let n = self.domain.dim();
        let mut header: Vec<String> = (1..=n).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
        header.push("value".into());
        writer.write_record(&header)?;
        let mut rows = 0;
        for p in &self.nodes {
            // Nodes whose value is undefined (stencil-free evaluation errors) are skipped.
            let Ok(v) = field.eval(p) else { continue };
            let mut record: Vec<String> = p.to_reals().iter().map(|x| format!("{x:.12e}")).collect();
            record.push(format!("{v:.17e}"));
            writer.write_record(&record)?;
            rows += 1;
        }
        writer.flush()?;
        Ok(rows)
    }
}

/// Lattice `anchor + h·k` restricted to `domain`.
pub fn sample_grid(domain: &Domain, h: f64) -> Result<Grid> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {h}")));
    }
    let bbox = domain.bounding_box().ok_or_else(|| Error::Unbounded(domain.describe()))?;
    let dims = bbox.center.len();
    let counts: Vec<i64> = bbox
        .half_widths
        .iter()
        .map(|w| (w / h + 1e-9).floor() as i64)
        .collect();
    let mut nodes = Vec::new();
    let mut idx: Vec<i64> = counts.iter().map(|c| -c).collect();
    let mut reals = vec![0.0; dims];
    'outer: loop {
        for k in 0..dims {
            reals[k] = bbox.center[k] + h * idx[k] as f64;
        }
        let p = ComplexPoint::from_reals(&reals)?;
        if domain.contains(&p) {
            nodes.push(p);
        }
        for k in (0..dims).rev() {
            if idx[k] < counts[k] {
                idx[k] += 1;
                continue 'outer;
            }
            idx[k] = -counts[k];
        }
        break;
    }
    Grid::from_nodes(domain.clone(), h, nodes)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn has_node(g: &Grid, re: f64, im: f64) -> bool {
        g.nodes()
            .iter()
            .any(|p| (p.coord(0) - Complex64::new(re, im)).norm() < 1e-12)
    }

    #[test]
    fn unit_disk_half_spacing_contains_axis_nodes() {
        let g = sample_grid(&Domain::centered_disk(1.0), 0.5).unwrap();
        for (re, im) in [(0.0, 0.0), (0.5, 0.0), (-0.5, 0.0), (0.0, 0.5), (0.0, -0.5)] {
            assert!(has_node(&g, re, im), "missing node {re}+{im}i");
        }
        assert!(g.nodes().iter().all(|p| p.coord(0).norm() < 1.0));
    }

    #[test]
    fn unit_polydisk_unit_spacing_is_single_origin_node() {
        let g = sample_grid(&Domain::centered_polydisk(2, 1.0), 1.0).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.nodes()[0], ComplexPoint::origin(2));
    }

    #[test]
    fn coarse_spacing_keeps_the_anchor() {
        // Lattice enumeration: with h = 3 only the anchor fits inside |w| < 1.
        let g = sample_grid(&Domain::centered_disk(1.0), 3.0).unwrap();
        assert_eq!(g.len(), 1);
        assert!(has_node(&g, 0.0, 0.0));
    }

    #[test]
    fn annulus_with_huge_spacing_is_empty() {
        let err = sample_grid(&Domain::annulus(Complex64::new(0.0, 0.0), 0.5, 1.0), 3.0).unwrap_err();
        assert!(matches!(err, Error::EmptyGrid { .. }));
    }

    #[test]
    fn csv_dump_has_schema_header() {
        let g = sample_grid(&Domain::centered_disk(1.0), 0.5).unwrap();
        let f = ScalarField::new("|w|^2", Domain::centered_disk(2.0), |p| p.coord(0).norm_sqr());
        let mut buf = Vec::new();
        let rows = g.write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "re_1,im_1,value");
        assert_eq!(rows, g.len());
    }
}
