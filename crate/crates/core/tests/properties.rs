//! Property tests over random grids, circuits and operators.

use chronon::circuit::{emit_netlist, layout, CircuitIR, GateAssignment, LayoutOptions, NetlistMode, TermKind};
use chronon::gates;
use chronon::effective::{build_effective, build_isometry, rotate_effective, EffectiveMode, EffectiveOp, IsometryW};
use chronon::grid::{GateRegion, GridSpec};
use chronon::hambuild::{build_h_string, build_v_hop, ModelParams, SectorBasis};
use chronon::harness::{random_circuit, run_experiment, ExperimentConfig, ExperimentKind};
use chronon::solve::{cluster, eigenvalues};
use chronon::sparse::{SparseOp, TripletBuilder, C64};
use chronon::stringspace::{bit, string_cells, string_to_sites, z_final, z_init, StringGraph};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fitted(m: usize, seed: u64, gates: usize) -> (CircuitIR, GridSpec, chronon::circuit::GateAssignment) {
    let c = random_circuit(m, gates, seed, false);
    let (g, a) = layout(&c, m, LayoutOptions::default()).unwrap();
    (c, g, a)
}

#[test]
fn string_graph_sizes_and_xy_hopping() {
    let binom = |n: usize, k: usize| (0..k).fold(1usize, |a, i| a * (n - i) / (i + 1));
    for m in 1..=8 {
        let graph = StringGraph::new(m).unwrap();
        assert_eq!(graph.len(), binom(2 * m, m));
        // Neighbours are exactly the words reached by swapping an adjacent 01 / 10 pair.
        for (k, &z) in graph.nodes().iter().enumerate() {
            let mut want: Vec<usize> = (0..2 * m - 1)
                .filter(|&i| bit(z, i) != bit(z, i + 1))
                .map(|i| graph.index_of(z ^ (0b11 << i)).unwrap())
                .collect();
            want.sort_unstable();
            let mut got = graph.neighbours(k);
            got.sort_unstable();
            assert_eq!(got, want);
        }
    }
}

#[test]
fn string_edges_move_one_line_by_one_hop() {
    for m in 1..=5 {
        let graph = StringGraph::new(m).unwrap();
        for e in graph.edges() {
            let a = string_cells(graph.nodes()[e.from], m);
            let b = string_cells(graph.nodes()[e.to], m);
            let moved: Vec<usize> = (0..a.len()).filter(|&l| a[l] != b[l]).collect();
            assert_eq!(moved, vec![e.line]);
            assert_eq!((b[e.line].0, b[e.line].1), (a[e.line].0 + 1, a[e.line].1 + 1));
        }
    }
}

#[test]
fn end_strings_sit_at_line_ends() {
    for m in 1..=6 {
        let grid = GridSpec::new(m, vec![]).unwrap();
        let first = string_to_sites(&grid, z_init(m)).unwrap();
        let last = string_to_sites(&grid, z_final(m)).unwrap();
        for l in 0..=2 * m {
            let cells: Vec<(usize, usize)> = grid.line(l).sites.iter().map(|&s| grid.site(s).cell()).collect();
            assert_eq!(first[l], *cells.iter().min().unwrap());
            assert_eq!(last[l], *cells.iter().max().unwrap());
        }
    }
}

/// Adds `γ V(z) V(z')^† |z><z'|` (plus its adjoint) for random string pairs.
fn add_multi_hop_terms(eff: &EffectiveOp, w: &IsometryW, seed: u64, count: usize) -> SparseOp {
    let sd = eff.basis.spin_dim();
    let n = eff.basis.graph.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = TripletBuilder::new(eff.op.dim());
    for (r, c, v) in eff.op.iter() {
        b.add(r, c, v);
    }
    for _ in 0..count {
        let (z, z2) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if z == z2 {
            continue;
        }
        let gamma = rng.gen_range(-1.0..1.0) * 1e-3;
        let block: DMatrix<C64> = w.unitary(z) * w.unitary(z2).adjoint() * C64::new(gamma, 0.0);
        for s in 0..sd {
            for s2 in 0..sd {
                b.add(z * sd + s, z2 * sd + s2, block[(s, s2)]);
                b.add(z2 * sd + s2, z * sd + s, block[(s, s2)].conj());
            }
        }
    }
    b.build()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn operators_are_hermitian_with_expected_structure(seed in 0u64..10_000, m in 2usize..4) {
        let (_, grid, a) = fitted(m, seed, 6);
        let sector = SectorBasis::new(&grid);
        let hs = build_h_string(&grid, &sector, 1.0);
        let v = build_v_hop(&grid, &a, &sector);
        prop_assert!(hs.is_diagonal());
        prop_assert!(v.diagonal().iter().all(|&d| d == 0.0));
        prop_assert!(hs.hermiticity_error() <= 1e-12 && v.hermiticity_error() <= 1e-12);
    }

    #[test]
    fn rotation_leaves_bare_hops(seed in 0u64..10_000, m in 2usize..4) {
        let g = 0.01;
        let (_, grid, a) = fitted(m, seed, 10);
        let eff = build_effective(&grid, &a, g, &EffectiveMode::Hamiltonian).unwrap();
        let w = build_isometry(&grid, &a).unwrap();
        prop_assert!(w.isometry_error() <= 1e-12);
        let rotated = rotate_effective(&eff, &w).unwrap();
        for (_, _, v) in rotated.iter() {
            prop_assert!((v + g).norm() <= 1e-12, "entry {}", v);
        }
    }

    #[test]
    fn multi_hop_terms_rotate_to_identity_blocks(seed in 0u64..10_000) {
        let (_, grid, a) = fitted(3, seed, 10);
        let eff = build_effective(&grid, &a, 0.01, &EffectiveMode::Hamiltonian).unwrap();
        let w = build_isometry(&grid, &a).unwrap();
        let extended = EffectiveOp { op: add_multi_hop_terms(&eff, &w, seed, 12), ..eff.clone() };
        let rotated = rotate_effective(&extended, &w).unwrap();
        let sd = eff.basis.spin_dim();
        let dense = rotated.to_dense();
        let n = eff.basis.graph.len();
        for z in 0..n {
            for z2 in 0..n {
                let blk = dense.view((z * sd, z2 * sd), (sd, sd));
                let d = blk[(0, 0)];
                for r in 0..sd {
                    for c in 0..sd {
                        let want = if r == c { d } else { C64::new(0.0, 0.0) };
                        prop_assert!((blk[(r, c)] - want).norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn netlist_pairs_and_degrees(seed in 0u64..10_000, with_region in any::<bool>()) {
        // Non-identity gates sit on every other plaquette of a line and away from
        // the region, so each site has an identity plaquette on at least one side.
        let m = 4;
        let regions = if with_region { vec![GateRegion::cnot((2, 1), 1)] } else { vec![] };
        let grid = GridSpec::new(m, regions).unwrap();
        let region_cells: Vec<(usize, usize)> = grid
            .plaquettes()
            .iter()
            .filter(|p| p.region.is_some())
            .flat_map(|p| [p.base, p.top, p.far, p.bottom])
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = GateAssignment::identity(&grid);
        for (k, p) in grid.plaquettes().iter().enumerate() {
            let corners = [p.base, p.top, p.far, p.bottom];
            if p.region.is_none() && p.base.0.min(p.base.1) % 2 == 0 && !corners.iter().any(|c| region_cells.contains(c)) {
                a.plaquette_gates[k] = [gates::HADAMARD, gates::PHASE_S, gates::PAULI_X][rng.gen_range(0..3)];
            }
        }
        let p = ModelParams::default();
        for mode in [NetlistMode::Hamiltonian, NetlistMode::Adiabatic { lambda: 0.5, input: Some(vec![0; 2 * m - 1]) }] {
            let net = emit_netlist(&grid, &a, &mode, &p).unwrap();
            // Adiabatic mode adds 4 plaquette partners and 4 same-line no-loop partners.
            let zz_cap = if mode == NetlistMode::Hamiltonian { 10 } else { 18 };
            for q in net.qubits() {
                let zz = net.partners(q, &[TermKind::ZZ]);
                let hop = net.partners(q, &[TermKind::XXpYY, TermKind::XYmYX]);
                prop_assert!(zz.len() <= zz_cap, "{:?} has {} ZZ partners", q, zz.len());
                prop_assert!(hop.len() <= 3, "{:?} has {} hop partners", q, hop.len());
                if mode == NetlistMode::Hamiltonian {
                    prop_assert!(zz.iter().all(|x| !hop.contains(x)));
                }
            }
        }
    }

    #[test]
    fn spectra_survive_relabelling(seed in 0u64..10_000) {
        let (_, grid, a) = fitted(2, seed, 4);
        let sector = SectorBasis::new(&grid);
        let h = build_h_string(&grid, &sector, 1.0).add_scaled(&build_v_hop(&grid, &a, &sector), 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..h.dim()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let a_vals = eigenvalues(&h);
        let b_vals = eigenvalues(&h.permute(&perm));
        let worst = a_vals.iter().zip(&b_vals).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-10);
    }
}

#[test]
fn degeneracy_clusters_are_stable() {
    for (m, regions) in [(2, vec![]), (2, vec![GateRegion::cnot((1, 1), 1)]), (3, vec![GateRegion::cnot((1, 1), 1)])] {
        let grid = GridSpec::new(m, regions).unwrap();
        let vals = eigenvalues(&build_h_string(&grid, &SectorBasis::new(&grid), 1.0));
        assert_eq!(cluster(&vals, 1e-8), cluster(&vals, 1e-9));
    }
}

fn files_under(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files_under(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn reports_are_reproducible_and_contained() {
    let root = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let mut cfg = ExperimentConfig::new(ExperimentKind::LogicCheck);
        cfg.m = 2;
        cfg.seed = 11;
        cfg.params.circuits = 3;
        cfg.params.max_gates = 3;
        cfg.params.t_steps = 30;
        cfg.out = root.path().join(name);
        let r = run_experiment(&cfg).unwrap();
        assert!(r.passed());
        (r, cfg.out)
    };
    let (a, out_a) = run("a");
    let (b, out_b) = run("b");
    assert_eq!(a.data, b.data);
    assert_eq!(std::fs::read(out_a.join("logic.csv")).unwrap(), std::fs::read(out_b.join("logic.csv")).unwrap());
    for f in files_under(root.path()) {
        assert!(f.starts_with(&out_a) || f.starts_with(&out_b), "stray file {}", f.display());
    }
}
