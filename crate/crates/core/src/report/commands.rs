use super::ingest::{ingest_density, ingest_graph, ingest_points};
use super::table::{Cell, ColumnKind as K, Table, Verdict};
use super::RunConfig;
use crate::diag::*;
use crate::filling::*;
use crate::metric::{build_net_hierarchy, check_net_invariants, FiniteMetricSpace, NetHierarchy};
use crate::pcf::*;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Default)]
pub(super) struct Output {
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    /// Extra files: (relative path, contents).
    pub files: Vec<(String, String)>,
}

pub(super) fn dispatch(cfg: &RunConfig) -> Result<Output> {
    match (cfg.group.as_str(), cfg.verb.as_str()) {
        ("filling", "build") => filling_build(cfg),
        ("filling", "weights") => filling_weights(cfg),
        ("filling", "check") => filling_check(cfg),
        ("pcf", "energy") => pcf_energy(cfg),
        ("pcf", "m2") => pcf_m2(cfg),
        ("pcf", "spectrum") => pcf_spectrum(cfg),
        ("pcf", "vicsek") => pcf_vicsek(cfg),
        ("pcf", "sgdegen") => pcf_sgdegen(cfg),
        ("diag", "cap") => diag_cap(cfg),
        ("diag", "ehi") => diag_ehi(cfg),
        ("diag", "vd") => diag_vd(cfg),
        ("diag", "rh") => diag_rh(cfg),
        ("diag", "d_h") => diag_dh(cfg),
        ("diag", "g1d") => diag_g1d(cfg),
        _ => Err(Error::Config(format!("unknown command '{}'", cfg.command()))),
    }
}

fn load_space(cfg: &RunConfig) -> Result<FiniteMetricSpace> {
    match &cfg.inputs.points {
        Some(p) => ingest_points(p),
        None => FiniteMetricSpace::grid_1d(cfg.params.points.unwrap_or(1000), 0.0, 1.0),
    }
}

/// Nearest-neighbour chain through 1-D points: conductance 1/gap, mass = half the adjacent gaps.
pub fn line_form(space: &FiniteMetricSpace) -> Result<GraphForm> {
    let coords = space
        .coords()
        .filter(|c| c.first().is_some_and(|x| x.len() == 1))
        .ok_or_else(|| Error::Config("a chain form needs 1-D coordinates; pass --graph".into()))?;
    let n = coords.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| coords[i][0].total_cmp(&coords[j][0]));
    let s = space.scale();
    let mut edges = Vec::with_capacity(n - 1);
    let mut mass = vec![0.0; n];
    for w in order.windows(2) {
        let h = s * (coords[w[1]][0] - coords[w[0]][0]);
        edges.push((w[0], w[1], 1.0 / h));
        mass[w[0]] += h / 2.0;
        mass[w[1]] += h / 2.0;
    }
    GraphForm::new(space.ids().to_vec(), edges, mass)
}

struct Filling {
    space: FiniteMetricSpace,
    nets: NetHierarchy,
    graph: FillingGraph,
}

fn filling_setup(cfg: &RunConfig) -> Result<Filling> {
    let p = &cfg.params;
    let space = load_space(cfg)?.normalized_diameter(0.5)?;
    let nets = build_net_hierarchy(&space, p.a.unwrap_or(40.0), p.max_level.unwrap_or(3))?;
    let graph = build_filling(&space, &nets, p.lambda.unwrap_or(32.0), None, cfg.strict)?;
    Ok(Filling { space, nets, graph })
}

fn filling_build(cfg: &RunConfig) -> Result<Output> {
    let f = filling_setup(cfg)?;
    let g = &f.graph;
    let mut out = Output::default();
    let mut vt = Table::new(
        "vertices",
        &[("vertex", K::Int), ("level", K::Int), ("center", K::Text), ("radius", K::Float), ("parent", K::Int)],
    );
    let mut et = Table::new("edges", &[("u", K::Int), ("v", K::Int), ("kind", K::Text)]);
    let mut vjson = Vec::new();
    let mut ejson = Vec::new();
    for v in 0..g.len() {
        let id = &f.space.ids()[g.center(v)];
        let parent = g.parent[v].map_or(-1, |p| p as i64);
        vt.push(vec![v.into(), g.level(v).into(), id.as_str().into(), g.radius(v).into(), parent.into()]);
        vjson.push(json!({"id": v, "level": g.level(v), "center": id, "radius": g.radius(v)}));
        if let Some(p) = g.parent[v] {
            et.push(vec![v.into(), p.into(), "v".into()]);
            ejson.push(json!({"u": v, "v": p, "kind": "v"}));
        }
        for &u in g.horizontal[v].iter().filter(|&&u| u > v) {
            et.push(vec![v.into(), u.into(), "h".into()]);
            ejson.push(json!({"u": v, "v": u, "kind": "h"}));
        }
    }
    let nets: Vec<Vec<&str>> =
        f.nets.levels.iter().map(|l| l.iter().map(|&x| f.space.ids()[x].as_str()).collect()).collect();
    let doc = json!({
        "a": f.nets.a, "lambda": g.params.lambda, "nets": nets, "vertices": vjson, "edges": ejson,
    });
    out.files.push(("filling.json".into(), serde_json::to_string_pretty(&doc)? + "\n"));
    let net_issue = check_net_invariants(&f.space, &f.nets);
    out.verdicts.push(
        Verdict::new("net_invariants", "build_net_hierarchy", net_issue.is_none())
            .with("detail", net_issue.unwrap_or_else(|| "ok".into())),
    );
    let tree = (1..g.len()).all(|v| g.parent[v].is_some_and(|p| g.level(p) + 1 == g.level(v)));
    out.verdicts.push(
        Verdict::new("vertical_tree", "build_filling", tree)
            .with("d_h", g.d_h)
            .with("d_v", g.d_v)
            .with("horizontal_edges", g.horizontal_edge_count()),
    );
    out.tables.extend([vt, et]);
    Ok(out)
}

fn point_form(cfg: &RunConfig, space: &FiniteMetricSpace) -> Result<GraphForm> {
    let form = match &cfg.inputs.graph {
        Some(p) => ingest_graph(p)?,
        None => line_form(space)?,
    };
    if form.len() != space.len() {
        return Err(Error::Config(format!("graph has {} vertices but the space has {}", form.len(), space.len())));
    }
    Ok(form)
}

fn filling_weights(cfg: &RunConfig) -> Result<Output> {
    let p = &cfg.params;
    let f = filling_setup(cfg)?;
    let g = &f.graph;
    let beta = p.beta.unwrap_or(2.5);
    let gamma = p.gamma.unwrap_or(2.0);
    let form = point_form(cfg, &f.space)?;
    let ball = vertex_ball_masses(g, &f.space, form.measure());
    let gentle = gentle_capacity_function(g, &ball, gamma)?;
    let sigma = match p.sigma.as_deref().unwrap_or("gradient") {
        "zero" => SigmaFunction::zero(g),
        _ => gradient_sigma(g, &f.space, &form)?.0,
    };
    let policy = if cfg.strict { SynthesisPolicy::Strict } else { SynthesisPolicy::Report };
    let (w, rep) = synthesize_weight(g, &f.space, &gentle, &sigma, beta, policy)?;
    let measure = measure_from_weights(g, &w, &gentle, beta, DRIFT_TOL);

    let mut out = Output::default();
    let mut wt = Table::new(
        "weights",
        &[
            ("vertex", K::Int),
            ("level", K::Int),
            ("rho", K::Float),
            ("log_pi", K::Float),
            ("sigma", K::Float),
            ("capacity", K::Float),
        ],
    );
    for v in 0..g.len() {
        wt.push(vec![
            v.into(),
            g.level(v).into(),
            w.rho[v].into(),
            w.log_pi[v].into(),
            sigma.sigma[v].into(),
            gentle.c[v].into(),
        ]);
    }
    out.tables.push(wt);
    let op = "synthesize_weight";
    out.verdicts.push(
        Verdict::new("s1", op, rep.s1_ok).with("min_crossing_sum", rep.s1_min.unwrap_or(f64::INFINITY)),
    );
    out.verdicts.push(Verdict::new("s2", op, rep.s2_ok).with("ratio", rep.s2_ratio).with("eta0", rep.eta0));
    out.verdicts.push(
        Verdict::new("enhanced_subadditivity", "gentle_capacity_function", gentle.e_holds)
            .with("delta", gentle.e_delta)
            .with("parents_without_non_peripheral_child", gentle.no_np_parents.len())
            .with("k_h", gentle.k_h)
            .with("k_v", gentle.k_v),
    );
    out.verdicts.push(
        Verdict::new("h1", "check_H1", rep.h1.pass).with("eta_minus", rep.h1.eta_minus).with("eta_plus", rep.h1.eta_plus),
    );
    out.verdicts.push(
        Verdict::new("h2", "check_H2", rep.k0 <= rep.k0_bound).with("k0", rep.k0).with("bound", rep.k0_bound),
    );
    out.verdicts.push(
        Verdict::new("h3prime", "check_H3prime", rep.h3.pass)
            .with("min_cost", rep.h3.min_cost)
            .with("vacuous", rep.h3.no_crossing_paths),
    );
    out.verdicts.push(
        Verdict::new("balance", op, rep.unbalanced.is_empty() && rep.balance_error <= BALANCE_RTOL)
            .with("unbalanced_parents", rep.unbalanced.len())
            .with("max_relative_error", rep.balance_error),
    );
    out.verdicts.push(Verdict::new("compatibility", "compatibility_check", rep.k2 <= 1.0 + 1e-8).with("k2", rep.k2));
    match measure {
        Ok(m) => {
            let mut lt = Table::new("level_mass", &[("level", K::Int), ("total", K::Float)]);
            for (k, t) in m.totals.iter().enumerate() {
                lt.push(vec![k.into(), (*t).into()]);
            }
            out.tables.push(lt);
            out.verdicts.push(Verdict::new("mass_conservation", "measure_from_weights", true).with("drift", m.drift));
        }
        Err(e) => out.verdicts.push(
            Verdict::new("mass_conservation", "measure_from_weights", false).with("error", e.to_string()),
        ),
    }
    out.verdicts.push(Verdict::new("beta_above_two", op, !rep.beta_margin_flag).with("beta", beta));
    Ok(out)
}

fn filling_check(cfg: &RunConfig) -> Result<Output> {
    let p = &cfg.params;
    let f = filling_setup(cfg)?;
    let g = &f.graph;
    let rho = p.rho.unwrap_or(1.0 / f.nets.a);
    let w = WeightFunction::constant(g, rho)?;
    let h1 = check_h1(&w);
    let k0 = check_h2(g, &w);
    let h3 = check_h3prime(g, &f.space, &w);
    let mut out = Output::default();
    out.verdicts.push(Verdict::new("h1", "check_H1", h1.pass).with("eta_minus", h1.eta_minus).with("eta_plus", h1.eta_plus));
    out.verdicts.push(Verdict::new("h2", "check_H2", k0.is_finite()).with("k0", k0));
    out.verdicts.push(
        Verdict::new("h3prime", "check_H3prime", h3.pass).with("min_cost", h3.min_cost).with("vacuous", h3.no_crossing_paths),
    );
    let deep = &f.nets.levels[f.nets.max_level()];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let pairs: Vec<(usize, usize)> = (0..32)
        .map(|_| (deep[rng.random_range(0..deep.len())], deep[rng.random_range(0..deep.len())]))
        .filter(|(x, y)| x != y)
        .collect();
    let est = boundary_metric_estimate(g, &f.space, &w, p.alpha.unwrap_or(2.0), &pairs)?;
    let mut bt = Table::new(
        "boundary",
        &[("x", K::Text), ("y", K::Text), ("d", K::Float), ("level", K::Int), ("theta", K::Float), ("unseparated", K::Text)],
    );
    for e in &est {
        bt.push(vec![
            f.space.ids()[e.x].as_str().into(),
            f.space.ids()[e.y].as_str().into(),
            f.space.dist(e.x, e.y).into(),
            e.level.into(),
            e.theta.into(),
            e.unseparated.into(),
        ]);
    }
    out.tables.push(bt);
    Ok(out)
}

fn load_pcf(cfg: &RunConfig) -> Result<Pcf> {
    let p = &cfg.params;
    match p.fractal.as_deref().unwrap_or("sg") {
        "sg" => Pcf::sg(p.dim.unwrap_or(2)),
        "vicsek" => Pcf::vicsek(p.r.unwrap_or(0.25)),
        "interval" => Ok(Pcf::interval()),
        other => Err(Error::Config(format!("'{other}' is not a p.c.f. structure"))),
    }
}

fn unit(n: usize, j: usize) -> Vec<f64> {
    (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect()
}

fn pcf_energy(cfg: &RunConfig) -> Result<Output> {
    let pcf = load_pcf(cfg)?;
    let n = cfg.params.level.unwrap_or(3);
    let net = build_level(&pcf.ss, n);
    let nb = pcf.n_boundary();
    let mut t = Table::new("energy", &[("boundary", K::Int), ("e0", K::Float), ("en", K::Float), ("diff", K::Float)]);
    let mut worst: f64 = 0.0;
    for j in 0..nb {
        let u0 = unit(nb, j);
        let e0 = pcf.hs.energy0(&u0);
        let en = pcf.graph_energy(&net, &pcf.harmonic_extension(&net, &u0));
        worst = worst.max((en - e0).abs() / e0.max(1.0));
        t.push(vec![j.into(), e0.into(), en.into(), (en - e0).into()]);
    }
    let mut out = Output::default();
    out.tables.push(t);
    out.verdicts.push(
        Verdict::new("harmonic_structure", "validate_harmonic_structure", pcf.validation.validated)
            .with("residual", pcf.validation.residual)
            .with("norm_d", pcf.validation.norm_d),
    );
    out.verdicts.push(
        Verdict::new("extension_energy", "harmonic_extension", worst <= 1e-10).with("max_relative_diff", worst).with("level", n),
    );
    Ok(out)
}

/// C* of the Kusuoka pair measure against its cell-graph metric, per level.
pub fn m2_profile(pcf: &Pcf, levels: std::ops::RangeInclusive<usize>) -> Result<Vec<M2Report>> {
    let hb = helmert_basis(pcf.n_boundary());
    let b1: Vec<f64> = hb.column(0).iter().copied().collect();
    let b2: Vec<f64> = hb.column(1).iter().copied().collect();
    let depth = *levels.end();
    let h1 = HarmonicFunction::new(pcf, &b1, depth)?;
    let h2 = HarmonicFunction::new(pcf, &b2, depth)?;
    levels
        .map(|l| {
            let mu = kusuoka_pair_measure(pcf, &h1, &h2, l)?;
            let g = cell_graph_metric(pcf, &mu, l)?;
            m2_constant(&g.diameters, &mu, pcf, l)
        })
        .collect()
}

fn pcf_m2(cfg: &RunConfig) -> Result<Output> {
    let pcf = load_pcf(cfg)?;
    let hi = cfg.params.max_level.unwrap_or(7);
    let lo = cfg.params.level.unwrap_or(3).min(hi);
    let reps = m2_profile(&pcf, lo..=hi)?;
    let mut t = Table::new(
        "c_star",
        &[("level", K::Int), ("c_star", K::Float), ("ratio", K::Float), ("zero_mass_cells", K::Int), ("argmax", K::Text)],
    );
    let mut max_ratio: f64 = 0.0;
    for (i, r) in reps.iter().enumerate() {
        let ratio = if i == 0 { 1.0 } else { r.c_star / reps[i - 1].c_star };
        if i > 0 {
            max_ratio = max_ratio.max(if ratio.is_nan() { f64::INFINITY } else { ratio });
        }
        t.push(vec![(lo + i).into(), r.c_star.into(), ratio.into(), r.zero_mass_cells.into(), r.argmax.to_string().into()]);
    }
    let overflow = reps.iter().any(|r| r.overflow);
    let mut out = Output::default();
    out.tables.push(t);
    out.verdicts.push(
        Verdict::new("m2_bounded", "m2_constant", !overflow && max_ratio <= 1.2)
            .with("max_level_ratio", max_ratio)
            .with("overflow", overflow),
    );
    Ok(out)
}

fn pcf_spectrum(cfg: &RunConfig) -> Result<Output> {
    let pcf = load_pcf(cfg)?;
    let w = Word::parse(cfg.params.word.as_deref().unwrap_or("0"), pcf.alphabet())?;
    let s = fw_star_spectrum(&pcf, &w);
    let mut t = Table::new("spectrum", &[("kind", K::Text), ("re", K::Float), ("im", K::Float)]);
    for &(re, im) in &s.full {
        t.push(vec!["full".into(), re.into(), im.into()]);
    }
    for &(re, im) in &s.quotient {
        t.push(vec!["quotient".into(), re.into(), im.into()]);
    }
    let mut out = Output::default();
    out.tables.push(t);
    if cfg.params.fractal.as_deref().unwrap_or("sg") == "sg" && w.len() == 1 {
        let nf = pcf.n_boundary() as f64 - 1.0;
        let mut expect = vec![1.0 / (nf + 3.0); pcf.n_boundary() - 2];
        expect.insert(0, (nf + 1.0) / (nf + 3.0));
        let err = s
            .quotient
            .iter()
            .zip(&expect)
            .map(|(&(re, im), e)| (re - e).abs().max(im.abs()))
            .fold(0.0, f64::max);
        out.verdicts.push(
            Verdict::new("sg_quotient_eigenvalues", "fw_star_spectrum", err <= 1e-10 && s.quotient.len() == expect.len())
                .with("max_error", err),
        );
    }
    Ok(out)
}

/// (off-diagonal level-n mass)/E(h,h) for the Helmert basis of 0-harmonic functions.
pub fn vicsek_witness(pcf: &Pcf, level: usize) -> Result<Vec<(f64, f64, f64, usize)>> {
    let hb = helmert_basis(pcf.n_boundary());
    (0..hb.ncols())
        .map(|j| {
            let b: Vec<f64> = hb.column(j).iter().copied().collect();
            let h = HarmonicFunction::new(pcf, &b, level)?;
            let mu = cell_energy_measure(pcf, &h, level)?;
            let (mass, cells) = vicsek_off_diagonal_mass(pcf, &mu)?;
            Ok((pcf.hs.energy0(&b), mu.total(), mass, cells))
        })
        .collect()
}

fn pcf_vicsek(cfg: &RunConfig) -> Result<Output> {
    let pcf = Pcf::vicsek(cfg.params.r.unwrap_or(0.25))?;
    let level = cfg.params.level.unwrap_or(6);
    let rows = vicsek_witness(&pcf, level)?;
    let mut t = Table::new(
        "off_diagonal",
        &[("basis", K::Int), ("energy", K::Float), ("total", K::Float), ("off_mass", K::Float), ("cells", K::Int)],
    );
    let mut worst: f64 = 0.0;
    for (j, &(e, total, mass, cells)) in rows.iter().enumerate() {
        worst = worst.max(mass / e);
        t.push(vec![j.into(), e.into(), total.into(), mass.into(), cells.into()]);
    }
    let mut out = Output::default();
    out.tables.push(t);
    out.verdicts.push(
        Verdict::new("off_diagonal_mass_zero", "cell_energy_measure", worst <= 1e-12)
            .with("max_relative_mass", worst)
            .with("level", level),
    );
    Ok(out)
}

fn pcf_sgdegen(cfg: &RunConfig) -> Result<Output> {
    let rep = sg_degeneration_probe(cfg.params.dim.unwrap_or(3), cfg.params.level.unwrap_or(8))?;
    let mut ct = Table::new("chain", &[("k", K::Int), ("sum", K::Float), ("ratio", K::Float)]);
    for (k, s) in rep.chain_sums.iter().enumerate() {
        let ratio = if k == 0 { Cell::Float(f64::NAN) } else { rep.chain_ratios[k - 1].into() };
        ct.push(vec![k.into(), (*s).into(), ratio]);
    }
    let mut pt = Table::new("pullback", &[("j", K::Int), ("error", K::Float)]);
    for &(j, e) in &rep.phi_pullback_errors {
        pt.push(vec![j.into(), e.into()]);
    }
    let mut out = Output::default();
    out.tables.extend([ct, pt]);
    out.verdicts.push(
        Verdict::new("phi_pullback", "sg_degeneration_probe", rep.max_pullback_error() <= 1e-10)
            .with("max_error", rep.max_pullback_error()),
    );
    out.verdicts.push(
        Verdict::new("chain_ratio", "sg_degeneration_probe", rep.max_chain_ratio_error() <= 1e-6)
            .with("expected", rep.expected_chain_ratio)
            .with("max_error", rep.max_chain_ratio_error()),
    );
    Ok(out)
}

/// Form, metric and default (β, sample centers, top radius, radius step) for diagnostics.
struct Network {
    form: GraphForm,
    space: FiniteMetricSpace,
    beta: f64,
    centers: Vec<usize>,
    r0: f64,
    step: f64,
}

fn load_network(cfg: &RunConfig) -> Result<Network> {
    let p = &cfg.params;
    match p.fractal.as_deref().unwrap_or("path") {
        "sg" | "vicsek" | "interval" => {
            let pcf = load_pcf(&RunConfig {
                params: crate::report::Params { fractal: p.fractal.clone(), ..p.clone() },
                ..cfg.clone()
            })?;
            let net = pcf_resistance_network(&pcf, p.level.unwrap_or(5))?;
            let n = net.form.len();
            let stride = (n / 24).max(1);
            let step = pcf.hs.r.iter().copied().fold(0.0, f64::max);
            let beta = hausdorff_weight_dimension(&pcf.hs)? + 1.0;
            let r0 = 0.3 * net.space.diameter();
            Ok(Network { form: net.form, space: net.space, beta, centers: (0..n).step_by(stride).collect(), r0, step })
        }
        "path" => {
            let (form, space) = match &cfg.inputs.graph {
                Some(g) => {
                    let form = ingest_graph(g)?;
                    let space = match cfg.inputs.points {
                        Some(_) => load_space(cfg)?,
                        None => resistance_space(&form)?,
                    };
                    form.check_space(&space)?;
                    (form, space)
                }
                None => {
                    let space = load_space(cfg)?;
                    (line_form(&space)?, space)
                }
            };
            let n = space.len();
            let centers = vec![n / 4, n / 2, (7 * n) / 10];
            let r0 = 0.125 * space.diameter();
            Ok(Network { form, space, beta: 2.0, centers, r0, step: 0.5 })
        }
        other => Err(Error::Config(format!("'{other}' has no network"))),
    }
}

fn diag_cap(cfg: &RunConfig) -> Result<Output> {
    let net = load_network(cfg)?;
    let beta = cfg.params.beta.unwrap_or(net.beta);
    let samples: Vec<(usize, f64)> =
        (0..4).flat_map(|j| net.centers.iter().map(move |&c| (c, net.r0 * net.step.powi(j)))).collect();
    let rep = cap_beta_check(&net.form, &net.space, beta, 2.0, &samples)?;
    let mut t = Table::new(
        "cap_beta",
        &[("center", K::Int), ("r", K::Float), ("cap", K::Float), ("mass", K::Float), ("q", K::Float)],
    );
    for r in &rep.rows {
        t.push(vec![r.center.into(), r.r.into(), r.cap.into(), r.mass.into(), r.q.into()]);
    }
    let mut s = Table::new("trend", &[("r", K::Float), ("q_mean", K::Float)]);
    for &(r, q) in &rep.trend.scale_means {
        s.push(vec![r.into(), q.into()]);
    }
    let mut out = Output::default();
    out.tables.extend([t, s]);
    out.verdicts.push(
        Verdict::new("cap_beta_trend_flat", "cap_beta_check", rep.trend.flat_ratio <= FLAT_RATIO_MAX)
            .with("beta", beta)
            .with("drift_flagged", rep.trend.flagged)
            .with("c1", rep.c1)
            .with("flat_ratio", rep.trend.flat_ratio)
            .with("slope", rep.trend.slope)
            .with("skipped", rep.skipped),
    );
    Ok(out)
}

fn diag_ehi(cfg: &RunConfig) -> Result<Output> {
    let net = load_network(cfg)?;
    let balls: Vec<BallSpec> = net.centers.iter().map(|&c| BallSpec::new(&net.space, c, net.r0)).collect();
    let rep = ehi_constant_probe(&net.form, &net.space, &balls, cfg.params.delta.unwrap_or(0.5), cfg.seed())?;
    let mut t = Table::new(
        "ehi",
        &[("center", K::Int), ("radius", K::Float), ("n_ball", K::Int), ("n_inner", K::Int), ("ratio", K::Float)],
    );
    for b in &rep.balls {
        t.push(vec![b.center.into(), b.radius.into(), b.n_ball.into(), b.n_inner.into(), b.ratio.into()]);
    }
    let mut out = Output::default();
    out.tables.push(t);
    out.verdicts.push(Verdict::new("ehi_finite", "ehi_constant_probe", rep.worst.is_finite()).with("worst", rep.worst));
    Ok(out)
}

fn diag_vd(cfg: &RunConfig) -> Result<Output> {
    let net = load_network(cfg)?;
    let radii: Vec<f64> = (0..8).map(|j| 2.0 * net.r0 * 0.5f64.powi(j)).collect();
    let rep = vd_rvd_check(&net.space, net.form.measure(), &net.centers, &radii, 2.0)?;
    let mut t = Table::new("vd", &[("center", K::Int), ("r", K::Float), ("m_r", K::Float), ("m_2r", K::Float)]);
    for r in &rep.rows {
        t.push(vec![r.center.into(), r.r.into(), r.m_r.into(), r.m_2r.into()]);
    }
    let mut out = Output::default();
    out.tables.push(t);
    out.verdicts.push(Verdict::new("vd", "vd_rvd_check", rep.c_d.is_finite()).with("c_d", rep.c_d));
    out.verdicts.push(
        Verdict::new("rvd", "vd_rvd_check", rep.rvd_ok)
            .with("alpha", rep.alpha)
            .with("c_rvd", rep.c_rvd)
            .with("octaves", rep.octaves),
    );
    Ok(out)
}

fn diag_rh(cfg: &RunConfig) -> Result<Output> {
    let p = &cfg.params;
    let (x, m, w) = match &cfg.inputs.density {
        Some(path) => {
            let d = ingest_density(path)?;
            let n = d.x.len();
            // cell masses by trapezoid halves
            let mut m = vec![0.0; n];
            for i in 1..n {
                let h = d.x[i] - d.x[i - 1];
                m[i - 1] += h / 2.0;
                m[i] += h / 2.0;
            }
            (d.x.clone(), m, d.g.clone())
        }
        None => {
            let t = p.t.unwrap_or(1.0);
            let n = 1usize << 14;
            let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
            let w = x.iter().map(|v| v.powf(t)).collect();
            (x, vec![1.0 / n as f64; n], w)
        }
    };
    let (lo, hi) = (x[0].min(0.0), x[x.len() - 1].max(1.0));
    let rep = dyadic_reverse_holder(&x, &m, &w, p.p.unwrap_or(2.0), lo, hi, p.max_level.unwrap_or(8))?;
    let mut t = Table::new("reverse_holder", &[("level", K::Int), ("c_p", K::Float), ("c_sqrt", K::Float)]);
    for &(l, a, b) in &rep.per_level {
        t.push(vec![l.into(), a.into(), b.into()]);
    }
    let mut out = Output::default();
    out.tables.push(t);
    out.verdicts.push(
        Verdict::new("a_infinity", "dyadic_reverse_holder", rep.a_infinity).with("c_p", rep.c_p).with("c_sqrt", rep.c_sqrt),
    );
    Ok(out)
}

/// d_h(0,1) for h = d^e on the 2^{-k} grid of [0,1].
pub fn grid_semimetric_endpoint(k: u32, e: f64) -> f64 {
    let n = (1usize << k) + 1;
    let s = 1.0 / (n - 1) as f64;
    max_semimetric_from(n, |i, j| (s * (i as f64 - j as f64).abs()).powf(e), 0)[n - 1]
}

fn diag_dh(cfg: &RunConfig) -> Result<Output> {
    let p = &cfg.params;
    let mut out = Output::default();
    if p.fractal.as_deref() == Some("plane") {
        let plane = PowerWeightPlane { t: p.t.unwrap_or(1.0), gamma: p.gamma.unwrap_or(2.0) };
        let top = p.level.unwrap_or(6).max(3) as u32;
        let mut t = Table::new("axis_distance", &[("k", K::Int), ("d_h", K::Float), ("ratio", K::Float)]);
        let mut prev: Option<f64> = None;
        let mut worst: f64 = 0.0;
        for k in 2..=top {
            let d = plane.axis_distance(k, 2);
            let ratio = prev.map_or(f64::NAN, |q| d / q);
            if prev.is_some() {
                worst = worst.max(ratio);
            }
            t.push(vec![(k as usize).into(), d.into(), ratio.into()]);
            prev = Some(d);
        }
        out.tables.push(t);
        out.verdicts.push(
            Verdict::new("refinement_decrease_30pct", "max_semimetric", worst <= 0.7).with("max_ratio", worst),
        );
    } else {
        let e = p.exponent.unwrap_or(2.0);
        let top = p.level.unwrap_or(10) as u32;
        let mut t = Table::new("endpoint_distance", &[("k", K::Int), ("d_h", K::Float), ("bound", K::Float)]);
        let mut ok = true;
        for k in 1..=top {
            let d = grid_semimetric_endpoint(k, e);
            let bound = 2.0 * 0.5f64.powi(k as i32);
            ok &= d <= bound;
            t.push(vec![(k as usize).into(), d.into(), bound.into()]);
        }
        out.tables.push(t);
        out.verdicts.push(Verdict::new("collapse", "max_semimetric", ok).with("exponent", e));
    }
    Ok(out)
}

fn diag_g1d(cfg: &RunConfig) -> Result<Output> {
    let p = &cfg.params;
    let w = match (&cfg.inputs.density, p.fractal.as_deref()) {
        (Some(path), _) => ingest_density(path)?,
        (None, Some("half")) => WeightedMeasure1D::sample(0.0, 1.0, 1 << 12, |x| if x >= 0.5 { 1.0 } else { 0.0 })?,
        (None, _) => WeightedMeasure1D::sample(0.0, 1.0, 1 << 12, |_| 1.0)?,
    };
    let rep = gaussian_1d_check(&w, p.max_level.unwrap_or(10))?;
    let mut t = Table::new("gaussian", &[("level", K::Int), ("c", K::Float)]);
    for (l, c) in rep.per_level.iter().enumerate() {
        t.push(vec![l.into(), (*c).into()]);
    }
    let mut out = Output::default();
    out.tables.push(t);
    out.verdicts.push(
        Verdict::new("gaussian_admissible", "gaussian_1d_check", rep.admissible)
            .with("c", rep.c)
            .with("infinite_intervals", rep.infinite_intervals)
            .with("d_int_total", rep.d_int_total),
    );
    Ok(out)
}
