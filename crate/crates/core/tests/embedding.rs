use std::collections::HashSet;

use lnls_core::embedding::{
    cubic_embedding, footprint, make_origin_embeddings, min_vertex_cover, pegasus_embedding, program, read_embedding,
    readout, write_embedding, DefectSpec, HardwareGraph,
};
use lnls_core::generators::gen_pm_j;
use lnls_core::ising::{build_subproblem, IsingModel};
use lnls_core::lattice::{LatticeKind, LatticeTopology, PegasusRegion, SubspaceSelection, SubspaceShape};
use lnls_core::rng::stream;
use lnls_core::samplers::brute_force;
use lnls_core::Error;
use proptest::prelude::*;
use rand::Rng;

fn clean(m: usize) -> HardwareGraph {
    HardwareGraph::pegasus(m, &DefectSpec::None).unwrap()
}

#[test]
fn identity_pegasus_embedding_at_advantage_scale() {
    let hw = clean(16);
    let e = pegasus_embedding(&hw, PegasusRegion::Fabric(15)).unwrap();
    assert_eq!(e.num_variables(), 5640);
    assert!((0..5640).all(|v| e.chain(v).len() == 1));
    e.validate(&hw).unwrap();
    let nice = pegasus_embedding(&hw, PegasusRegion::Nice(15)).unwrap();
    assert_eq!(nice.num_variables(), 5400);
    nice.validate(&hw).unwrap();
    assert!(pegasus_embedding(&hw, PegasusRegion::Fabric(16)).is_err());
}

#[test]
fn cubic_embedding_at_advantage_scale() {
    let hw = clean(16);
    let embs = make_origin_embeddings(&hw, LatticeKind::Cubic, &SubspaceShape::Cuboid([15, 15, 12])).unwrap();
    assert_eq!(embs.len(), 3);
    for e in &embs {
        assert_eq!(e.num_variables(), 2700);
        assert!((0..2700).all(|v| e.chain(v).len() == 2));
        assert!(e.vacancies().is_empty());
        e.validate(&hw).unwrap();
    }
    assert!(cubic_embedding(&hw, [16, 15, 12]).is_err());
    assert!(cubic_embedding(&hw, [15, 15, 13]).is_err());
}

#[test]
fn validator_rejects_unyielded_chain_qubit() {
    let mut hw = clean(4);
    let e = cubic_embedding(&hw, [3, 3, 12]).unwrap();
    e.validate(&hw).unwrap();
    hw.kill_qubit(e.chain(5)[1] as usize);
    let err = e.validate(&hw).unwrap_err().to_string();
    assert!(err.contains("unyielded qubit"), "{err}");
    let trimmed = e.trim_for_defects(&hw);
    assert_eq!(trimmed.vacancies(), vec![5]);
    trimmed.validate(&hw).unwrap();
}

#[test]
fn single_conflict_edge_vacates_lower_endpoint() {
    let base = clean(4);
    let e = cubic_embedding(&base, [3, 3, 4]).unwrap();
    // find a variable edge realised by exactly one coupler
    let (i, &(a, b)) = e.variable_edges().iter().enumerate().find(|(i, _)| e.edge_couplers(*i).len() == 1).unwrap();
    let mut hw = base.clone();
    hw.kill_coupler(e.edge_couplers(i)[0] as usize);
    let t = e.trim_for_defects(&hw);
    assert_eq!(t.vacancies(), vec![a.min(b) as usize]);
    t.validate(&hw).unwrap();
}

#[test]
fn cover_examples() {
    assert_eq!(min_vertex_cover(&[(3, 8)]).vertices, vec![3]);
    assert_eq!(min_vertex_cover(&[(1, 2), (2, 3)]).vertices, vec![2]);
}

fn brute_cover_size(edges: &[(u32, u32)], n: u32) -> usize {
    (0u32..1 << n)
        .filter(|m| edges.iter().all(|&(a, b)| m >> a & 1 == 1 || m >> b & 1 == 1))
        .map(|m| m.count_ones() as usize)
        .min()
        .unwrap()
}

proptest! {
    #[test]
    fn cover_is_minimum(raw in proptest::collection::vec((0u32..12, 0u32..12), 0..20)) {
        let edges: Vec<(u32, u32)> = raw.into_iter().filter(|(a, b)| a != b).collect();
        let c = min_vertex_cover(&edges);
        prop_assert!(!c.greedy);
        prop_assert!(edges.iter().all(|&(a, b)| c.vertices.contains(&a) || c.vertices.contains(&b)));
        prop_assert_eq!(c.vertices.len(), brute_cover_size(&edges, 12));
    }
}

#[test]
fn vacancy_count_grows_with_defects() {
    let hw0 = clean(6);
    let e = cubic_embedding(&hw0, [5, 5, 12]).unwrap();
    let mut hw = hw0.clone();
    let mut rng = stream(3, 0);
    let mut last = 0;
    for _ in 0..30 {
        if rng.random::<bool>() {
            hw.kill_qubit(rng.random_range(0..hw.num_qubits()));
        } else {
            hw.kill_coupler(rng.random_range(0..hw.graph().num_edges()));
        }
        let n = e.trim_for_defects(&hw).vacancies().len();
        assert!(n >= last);
        last = n;
    }
}

fn block_subproblem(
    seed: u64,
) -> (IsingModel, lnls_core::ising::Subproblem, lnls_core::embedding::OriginEmbedding, HardwareGraph) {
    let hw = clean(4);
    let emb = cubic_embedding(&hw, [2, 2, 2]).unwrap();
    let topo = LatticeTopology::cubic(4).unwrap();
    let model = gen_pm_j(&topo, seed).unwrap();
    let members = emb.lattice_members(&topo).unwrap();
    let sel = SubspaceSelection::from_members(topo.graph(), members).unwrap();
    let state = lnls_core::ising::SpinState::random(64, &mut stream(seed, 1));
    let sub = build_subproblem(&model, &state, &sel).unwrap();
    (model, sub, emb, hw)
}

#[test]
fn programming_rules() {
    let (_, sub, emb, hw) = block_subproblem(1);
    let p = program(&sub, &emb, &hw, 2.0).unwrap();
    let pos = |q: u32| p.qubits.iter().position(|&x| x == q).unwrap();
    let cpos = |c: u32| p.couplers.iter().position(|&x| x == c).unwrap();
    for (i, &v) in emb.active_variables().iter().enumerate() {
        assert_eq!(p.h[pos(emb.chain(v)[0])], sub.effective_fields()[i]);
        assert_eq!(p.h[pos(emb.chain(v)[1])], 0.0);
        for &c in emb.chain_couplers(v) {
            assert_eq!(p.j[cpos(c)], -2.0);
        }
    }
    // chain strength beyond the coupler range is rejected
    assert!(matches!(program(&sub, &emb, &hw, 3.0), Err(Error::ProgramRange { .. })));
}

#[test]
fn field_out_of_range_is_named() {
    let hw = clean(3);
    let emb = pegasus_embedding(&hw, PegasusRegion::Nice(1)).unwrap();
    let topo = LatticeTopology::toric_pegasus(3).unwrap();
    let members = emb.lattice_members(&topo).unwrap();
    let mut h = vec![0.0; topo.num_vertices()];
    h[members[3] as usize] = 5.0;
    let model = IsingModel::on_lattice(&topo, h, vec![0.0; topo.graph().num_edges()]).unwrap();
    let sel = SubspaceSelection::from_members(topo.graph(), members).unwrap();
    let state = lnls_core::ising::SpinState::uniform(topo.num_vertices(), 1);
    let sub = build_subproblem(&model, &state, &sel).unwrap();
    let err = program(&sub, &emb, &hw, 1.0).unwrap_err();
    match err {
        Error::ProgramRange { what, value, .. } => {
            assert!(what.contains("h of variable"));
            assert_eq!(value, 5.0);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn identity_programming_passes_values_through() {
    let mut hw = clean(3);
    // clamped boundaries of a single cell can exceed the default field range
    hw.h_range = (-16.0, 16.0);
    let emb = pegasus_embedding(&hw, PegasusRegion::Nice(1)).unwrap();
    let topo = LatticeTopology::toric_pegasus(3).unwrap();
    let model = gen_pm_j(&topo, 4).unwrap();
    let sel = SubspaceSelection::from_members(topo.graph(), emb.lattice_members(&topo).unwrap()).unwrap();
    let state = lnls_core::ising::SpinState::uniform(topo.num_vertices(), -1);
    let sub = build_subproblem(&model, &state, &sel).unwrap();
    let p = program(&sub, &emb, &hw, 1.0).unwrap();
    let pos = |q: u32| p.qubits.iter().position(|&x| x == q).unwrap();
    for (i, &v) in emb.active_variables().iter().enumerate() {
        assert_eq!(p.h[pos(emb.chain(v)[0])], sub.effective_fields()[i]);
    }
    let (fm, map) = p.footprint_model(&hw, &footprint(&emb)).unwrap();
    // footprint is the chain qubits in ascending order; chains have length 1
    let y: Vec<i8> = (0..sub.len()).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
    let mut hwx = vec![1i8; p.qubits.len()];
    for (i, &v) in emb.active_variables().iter().enumerate() {
        hwx[p.qubits.iter().position(|&q| q == emb.chain(v)[0]).unwrap()] = y[i];
    }
    let fx: Vec<i8> = map.iter().map(|&i| hwx[i]).collect();
    assert!((fm.energy(&fx).unwrap() - sub.energy(&y).unwrap()).abs() < 1e-12);
    assert_eq!(readout(&[hwx], &emb, &hw).unwrap()[0], y);
}

#[test]
fn readout_uses_first_qubit() {
    let (_, sub, emb, hw) = block_subproblem(2);
    let p = program(&sub, &emb, &hw, 2.0).unwrap();
    let mut s = vec![1i8; p.qubits.len()];
    let v = emb.active_variables()[0];
    let second = p.qubits.iter().position(|&q| q == emb.chain(v)[1]).unwrap();
    s[second] = -1;
    assert_eq!(readout(&[s], &emb, &hw).unwrap()[0][0], 1);
}

#[test]
fn unbroken_chains_shift_energy_by_a_constant() {
    let (_, sub, emb, hw) = block_subproblem(3);
    let p = program(&sub, &emb, &hw, 2.0).unwrap();
    let chain_couplers: usize = emb.active_variables().iter().map(|&v| emb.chain_couplers(v).len()).sum();
    let mut rng = stream(5, 0);
    for _ in 0..20 {
        let y: Vec<i8> = (0..sub.len()).map(|_| if rng.random() { 1 } else { -1 }).collect();
        let mut s = vec![1i8; p.qubits.len()];
        for (i, &v) in emb.active_variables().iter().enumerate() {
            for &q in emb.chain(v) {
                s[p.qubits.iter().position(|&x| x == q).unwrap()] = y[i];
            }
        }
        let offset = p.energy(&hw, &s).unwrap() - sub.energy(&y).unwrap();
        assert!((offset + 2.0 * chain_couplers as f64).abs() < 1e-12);
    }
}

#[test]
fn exact_programmed_solution_reads_out_optimally() {
    for seed in 0..4 {
        let (_, sub, emb, hw) = block_subproblem(seed);
        let p = program(&sub, &emb, &hw, 2.0).unwrap();
        let fp = footprint(&emb);
        assert!(fp.len() <= 20);
        let (fm, map) = p.footprint_model(&hw, &fp).unwrap();
        let (best, _) = brute_force(&fm).unwrap();
        let mut s = vec![1i8; p.qubits.len()];
        for (i, &yi) in map.iter().enumerate() {
            s[yi] = best[i];
        }
        let y = readout(&[s], &emb, &hw).unwrap().remove(0);
        let (_, sub_opt) = brute_force(sub.model()).unwrap();
        assert_eq!(sub.energy(&y).unwrap(), sub_opt, "seed {seed}");
    }
}

#[test]
fn embedding_file_round_trip_and_corruption() {
    let mut hw = clean(4);
    hw.kill_qubit(30);
    let emb = make_origin_embeddings(&hw, LatticeKind::Cubic, &SubspaceShape::Cuboid([3, 3, 12])).unwrap().remove(0);
    let mut buf = Vec::new();
    write_embedding(&emb, &hw, &mut buf).unwrap();
    let back = read_embedding(buf.as_slice(), &hw).unwrap();
    assert_eq!(back.vacancies(), emb.vacancies());
    back.validate(&hw).unwrap();

    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let first = lines.iter().position(|l| l.starts_with("var ")).unwrap();
    let stolen = lines[first].split_whitespace().nth(2).unwrap().to_string();
    let mut corrupted: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    let target = &mut corrupted[first + 1];
    let mut parts: Vec<&str> = target.split_whitespace().collect();
    parts[2] = &stolen;
    *target = parts.join(" ");
    let err = read_embedding(corrupted.join("\n").as_bytes(), &hw).unwrap_err().to_string();
    assert!(err.contains("not disjoint"), "{err}");
}

#[test]
fn disconnected_chain_is_reported() {
    let hw = clean(4);
    let emb = cubic_embedding(&hw, [2, 2, 4]).unwrap();
    let mut buf = Vec::new();
    write_embedding(&emb, &hw, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    // swap the second qubit of one chain for an unused, uncoupled qubit
    let used: HashSet<u32> = (0..emb.num_variables()).flat_map(|v| emb.chain(v).to_vec()).collect();
    let v0 = emb.chain(0)[0] as usize;
    let spare = (0..hw.num_qubits() as u32)
        .find(|&q| !used.contains(&q) && hw.graph().find_edge(v0, q as usize).is_none())
        .unwrap();
    let old = hw.coord(emb.chain(0)[1] as usize).to_string();
    let new = hw.coord(spare as usize).to_string();
    let first_var = text.lines().find(|l| l.starts_with("var ")).unwrap();
    let patched = text.replacen(first_var, &first_var.replace(&old, &new), 1);
    let back = read_embedding(patched.as_bytes(), &hw).unwrap();
    let err = back.validate(&hw).unwrap_err().to_string();
    assert!(err.contains("not connected"), "{err}");
}
