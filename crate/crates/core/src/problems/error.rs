use std::io::Write;

use super::{Grid2D, ProblemError};

/// Unweighted Euclidean norm of `u - u_ref`.
pub fn l2_error(u: &[f64], u_ref: &[f64]) -> Result<f64, ProblemError> {
    if u.len() != u_ref.len() {
        return Err(ProblemError::Length {
            left: u.len(),
            right: u_ref.len(),
        });
    }
    Ok(u.iter()
        .zip(u_ref)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeValue {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Per-node absolute difference `|u - u_ref|` on the interior grid.
pub fn error_field(u: &[f64], u_ref: &[f64], grid: &Grid2D) -> Result<Vec<NodeValue>, ProblemError> {
    for len in [u.len(), u_ref.len()] {
        if len != grid.len() {
            return Err(ProblemError::Length {
                left: len,
                right: grid.len(),
            });
        }
    }
    Ok((0..grid.len())
        .map(|k| {
            let (i, j) = grid.node(k);
            NodeValue {
                i,
                j,
                x: grid.coord(i),
                y: grid.coord(j),
                value: (u[k] - u_ref[k]).abs(),
            }
        })
        .collect())
}

/// Writes node values as CSV with header `i,j,x,y,value`.
pub fn write_node_csv<W: Write>(mut out: W, nodes: &[NodeValue]) -> std::io::Result<()> {
    writeln!(out, "i,j,x,y,value")?;
    for n in nodes {
        writeln!(out, "{},{},{:.16e},{:.16e},{:.16e}", n.i, n.j, n.x, n.y, n.value)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_values() {
        assert_eq!(l2_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(l2_error(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert!(l2_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn field_marks_single_perturbation() {
        let g = Grid2D::new(5).unwrap();
        let u = vec![1.0; g.len()];
        let mut v = u.clone();
        assert!(error_field(&u, &v, &g).unwrap().iter().all(|n| n.value == 0.0));
        v[7] += 1e-3;
        let field = error_field(&u, &v, &g).unwrap();
        let hit: Vec<_> = field.iter().filter(|n| n.value != 0.0).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!((hit[0].i, hit[0].j), g.node(7));
        assert!((hit[0].value - 1e-3).abs() < 1e-15);
        assert!(error_field(&u[1..], &v, &g).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = Grid2D::new(4).unwrap();
        let f = error_field(&vec![0.0; 9], &vec![0.5; 9], &g).unwrap();
        let mut buf = Vec::new();
        write_node_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "i,j,x,y,value");
        assert_eq!(lines.len(), 10);
        assert!(lines[1].starts_with("1,1,"));
    }

    fn vecs(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1e3..1e3f64, n)
    }

    proptest! {
        #[test]
        fn is_a_norm(a in vecs(12), b in vecs(12), c in vecs(12), s in -50.0..50.0f64) {
            let ab = l2_error(&a, &b).unwrap();
            let bc = l2_error(&b, &c).unwrap();
            let ac = l2_error(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9 * (1.0 + ab + bc));
            let sa: Vec<f64> = a.iter().map(|x| s * x).collect();
            let sb: Vec<f64> = b.iter().map(|x| s * x).collect();
            let scaled = l2_error(&sa, &sb).unwrap();
            prop_assert!((scaled - s.abs() * ab).abs() <= 1e-12 * (1.0 + s.abs() * ab));
            // independent summation oracle: pairwise sum of squares
            let mut sq: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).collect();
            while sq.len() > 1 {
                sq = sq.chunks(2).map(|ch| ch.iter().sum()).collect();
            }
            prop_assert!((sq[0].sqrt() - ab).abs() <= 1e-14 * (1.0 + ab));
        }
    }
}
