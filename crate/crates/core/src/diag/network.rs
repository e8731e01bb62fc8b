use super::GraphForm;
use crate::linalg::grounded_inverse;
use crate::metric::FiniteMetricSpace;
use crate::pcf::{build_level, LevelNetwork, hausdorff_weight_dimension, self_similar_measure, Pcf};
use crate::Result;

/// Level-n network of a p.c.f. form with its resistance metric and the self-similar measure.
#[derive(Clone, Debug)]
pub struct PcfNetwork {
    /// Vertex masses split each cell mass evenly among the cell's boundary vertices.
    pub form: GraphForm,
    pub space: FiniteMetricSpace,
    pub network: LevelNetwork,
}

pub fn pcf_resistance_network(pcf: &Pcf, n: usize) -> Result<PcfNetwork> {
    let net = build_level(&pcf.ss, n);
    let nv = net.n_vertices();
    let nb = pcf.n_boundary();
    let d_h = hausdorff_weight_dimension(&pcf.hs)?;
    let mu = self_similar_measure(pcf, d_h, n);
    let mut measure = vec![0.0; nv];
    for (idx, &m) in mu.masses.iter().enumerate() {
        for &v in net.cell(idx) {
            measure[v] += m / nb as f64;
        }
    }
    let rw = pcf.weights(n);
    let mut edges = Vec::new();
    for (idx, r) in rw.iter().enumerate() {
        let c = net.cell(idx);
        for p in 0..nb {
            for q in (p + 1)..nb {
                let d = pcf.hs.d[(p, q)];
                if d > 0.0 {
                    edges.push((c[p], c[q], d / r));
                }
            }
        }
    }
    let form = GraphForm::from_parts(nv, edges, measure)?;
    let space = resistance_space(&form)?;
    Ok(PcfNetwork { form, space, network: net })
}


/// Effective-resistance metric of a connected graph, one point per vertex.
pub fn resistance_space(form: &GraphForm) -> Result<FiniteMetricSpace> {
    let n = form.len();
    let g = grounded_inverse(form.laplacian(), 0)?;
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let r = g[(i, i)] + g[(j, j)] - 2.0 * g[(i, j)];
            m[i * n + j] = r;
            m[j * n + i] = r;
        }
    }
    FiniteMetricSpace::from_matrix(form.ids().to_vec(), m)
}
