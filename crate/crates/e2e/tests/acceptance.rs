//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::Instant;

use bose_mesner::anyons::{self, FMatrix, FusionSystem};
use bose_mesner::hypergroup::{self, Coin};
use bose_mesner::io::{Distribution, JsonDocument};
use bose_mesner::parameters::{check_krein_condition, intersection_numbers, krein_parameters, KreinTensor};
use bose_mesner::qmc::{self, CoinScaling, SchurChannel, Stochastic, TransitionExpectation};
use bose_mesner::scalar::{max_abs, max_abs_real, CMatrix, Cplx, RMatrix};
use bose_mesner::scheme::{self, verify_axioms, AssociationScheme};
use bose_mesner::spectral::{decompose, BoseMesnerDecomposition};
use bose_mesner::{FiniteGroup, IntersectionTensor};
use bose_mesner_cli::run;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn group(name: &str) -> FiniteGroup {
    FiniteGroup::builtin(name).unwrap()
}

/// Every built-in scheme named in the gate.
fn builtins() -> Vec<(String, AssociationScheme)> {
    let mut out = Vec::new();
    for name in ["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "S3", "S4", "D4", "Q8"] {
        out.push((format!("group {name}"), scheme::build_group_scheme(&group(name))));
    }
    for name in ["S3", "S4", "Q8"] {
        out.push((format!("conjugacy {name}"), scheme::build_conjugacy_scheme(&group(name))));
    }
    for (v, k) in [(4, 2), (5, 2), (6, 3)] {
        out.push((format!("J({v},{k})"), scheme::build_johnson(v, k).unwrap()));
    }
    for (q, v, d) in [(2, 3, 1), (2, 4, 2), (3, 2, 1)] {
        out.push((format!("J_{q}({v},{d})"), scheme::build_grassmann(q, v, d).unwrap()));
    }
    out
}

fn commutative_builtins() -> Vec<(String, AssociationScheme, BoseMesnerDecomposition<f64>)> {
    builtins()
        .into_iter()
        .filter(|(_, s)| verify_axioms(s).commutative)
        .map(|(name, s)| {
            let dec = decompose::<f64>(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, s, dec)
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let all = builtins();
    for (name, s) in &all {
        let report = verify_axioms(s);
        check(report.passed, format!("{name}: {:?}", report.violations))?;
    }
    Ok(format!("{} built-in schemes satisfy axioms (1)-(4)", all.len()))
}

/// Characteristic polynomial by Faddeev–LeVerrier, in exact integers.
fn char_poly(a: &[Vec<i64>]) -> Vec<i64> {
    let n = a.len();
    let mul = |x: &[Vec<i64>], y: &[Vec<i64>]| -> Vec<Vec<i64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
    };
    let mut coeffs = vec![1i64];
    let mut m = vec![vec![0i64; n]; n];
    for k in 1..=n {
        let c_prev = *coeffs.last().unwrap();
        // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k) / k
        let mut mk = mul(a, &m);
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += c_prev;
        }
        let amk = mul(a, &mk);
        let tr: i64 = (0..n).map(|i| amk[i][i]).sum();
        coeffs.push(-tr / k as i64);
        m = mk;
    }
    coeffs
}

fn root_multiplicity(coeffs: &[i64], root: i64) -> usize {
    let mut p = coeffs.to_vec();
    let mut mult = 0;
    loop {
        let mut q = Vec::with_capacity(p.len() - 1);
        let mut acc = 0i64;
        for &c in &p {
            acc = acc * root + c;
            q.push(acc);
        }
        if q.pop() != Some(0) || p.len() == 1 {
            return mult;
        }
        mult += 1;
        p = q;
    }
}

fn criterion_2() -> Verdict {
    let all = commutative_builtins();
    for (name, s, dec) in &all {
        let n = s.n();
        let c = s.classes();
        let e = dec.idempotents();
        let mut sum = CMatrix::<f64>::zeros(n, n);
        for ej in e {
            sum += ej;
        }
        let sum_gap = max_abs(&(sum - CMatrix::identity(n, n)));
        check(sum_gap < 1e-10, format!("{name}: ΣE_j - I = {sum_gap:e}"))?;
        for i in 0..c {
            for j in 0..c {
                let target = if i == j { e[i].clone() } else { CMatrix::zeros(n, n) };
                let gap = max_abs(&(&e[i] * &e[j] - target));
                check(gap < 1e-10, format!("{name}: E_{i}E_{j} gap {gap:e}"))?;
            }
            let tr = e[i].trace().re;
            check((tr - dec.multiplicities()[i] as f64).abs() < 1e-6, format!("{name}: tr E_{i} = {tr}"))?;
        }
        check(dec.multiplicities().iter().sum::<usize>() == n, format!("{name}: multiplicities do not sum to n"))?;
    }
    // J(4,2): eigenvalue multiplicities of A_1 from the characteristic polynomial
    let s = scheme::build_johnson(4, 2).unwrap();
    let a1: Vec<Vec<i64>> = (0..6).map(|x| (0..6).map(|y| i64::from(s.class_of(x, y) == 1)).collect()).collect();
    let poly = char_poly(&a1);
    let oracle: Vec<(i64, usize)> = [4, 0, -2].iter().map(|&r| (r, root_multiplicity(&poly, r))).collect();
    let dec = decompose::<f64>(&s).unwrap();
    check(dec.multiplicities() == [1, 3, 2], format!("J(4,2) multiplicities {:?}", dec.multiplicities()))?;
    for (j, &(root, mult)) in oracle.iter().enumerate() {
        let theta = dec.eigenmatrix_p()[(j, 1)].re;
        check((theta - root as f64).abs() < 1e-9 && mult == dec.multiplicities()[j], format!("J(4,2) oracle {oracle:?}"))?;
    }
    Ok(format!("{} commutative schemes; J(4,2) multiplicities (1,3,2) match the characteristic polynomial", all.len()))
}

fn criterion_3() -> Verdict {
    let all = commutative_builtins();
    for (name, s) in builtins() {
        let p = intersection_numbers(&s).map_err(|e| format!("{name}: {e}"))?;
        p.check_matrix_identity(&s).map_err(|(i, j)| format!("{name}: A_{i}A_{j} expansion fails"))?;
    }
    let mut worst = 0.0f64;
    for (name, _, dec) in &all {
        let q = krein_parameters(dec).map_err(|e| format!("{name}: {e}"))?;
        check(check_krein_condition(&q).passed(), format!("{name}: Krein condition"))?;
        let m = dec.multiplicities();
        let c = m.len();
        for i in 0..c {
            for j in 0..c {
                let lhs: f64 = (0..c).map(|k| m[k] as f64 * q.get(i, j, k)).sum();
                worst = worst.max((lhs - (m[i] * m[j]) as f64).abs());
            }
        }
    }
    check(worst < 1e-8, format!("trace identity residual {worst:e}"))?;
    Ok(format!("intersection numbers exact; Krein ≥ -1e-9; trace identity residual {worst:.1e}"))
}

fn is_group_table(conv: &[Vec<Vec<f64>>], g: &FiniteGroup, map: &[usize]) -> bool {
    let k = g.order();
    (0..k).all(|a| {
        (0..k).all(|b| {
            (0..k).all(|c| {
                let want = if map[g.mul(a, b)] == map[c] { 1.0 } else { 0.0 };
                (conv[map[a]][map[b]][map[c]] - want).abs() < 1e-10
            })
        })
    })
}

fn criterion_4() -> Verdict {
    let mut errors = Vec::new();
    for (name, _, dec) in commutative_builtins() {
        let q = krein_parameters(&dec).unwrap();
        let h = hypergroup::hypergroup_from(&dec, &q).map_err(|e| format!("{name}: {e}"))?;
        let c = h.size();
        for i in 0..c {
            for j in 0..c {
                let s: f64 = (0..c).map(|k| h.weight(i, j, k)).sum();
                check((s - 1.0).abs() < 1e-10, format!("{name}: slice ({i},{j}) sums to {s}"))?;
                let id = (0..c).all(|k| h.weight(0, j, k) == if j == k { 1.0 } else { 0.0 });
                check(id, format!("{name}: e_0 is not an exact identity"))?;
            }
        }
    }
    for k in [2usize, 3] {
        let g = FiniteGroup::cyclic(k).unwrap();
        let dec = decompose::<f64>(&scheme::build_group_scheme(&g)).unwrap();
        let h = hypergroup::hypergroup_from(&dec, &krein_parameters(&dec).unwrap()).unwrap();
        let perms: Vec<Vec<usize>> = if k == 2 { vec![vec![0, 1]] } else { vec![vec![0, 1, 2], vec![0, 2, 1]] };
        check(
            perms.iter().any(|map| is_group_table(h.convolution(), &g, map)),
            format!("Z{k} hypergroup is not the group Z{k}"),
        )?;
    }
    let dec = decompose::<f64>(&scheme::build_johnson(4, 2).unwrap()).unwrap();
    let h = hypergroup::hypergroup_from(&dec, &krein_parameters(&dec).unwrap()).unwrap();
    let traj = hypergroup::walk(&h, &Coin::Index(1), &[1.0, 0.0, 0.0], 200).unwrap();
    let target = [1.0 / 6.0, 0.5, 1.0 / 3.0];
    let dist = |v: &Vec<f64>| v.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let best = traj.iter().map(dist).fold(f64::INFINITY, f64::min);
    if best >= 1e-6 {
        errors.push(format!(
            "J(4,2) coin-1 walk from δ_0 does not converge: min distance to (1/6,1/2,1/3) over 200 steps is {best:.4}; \
             step 199 = {:?}, step 200 = {:?} (period 2)",
            traj[199].iter().map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>(),
            traj[200].iter().map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>()
        ));
    }
    if errors.is_empty() {
        Ok("slices sum to 1, e_0 exact identity, Z2/Z3 recovered, J(4,2) walk converges".into())
    } else {
        Err(format!("slices, identity and Z2/Z3 pass; {}", errors.join("; ")))
    }
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, psd: bool) -> CMatrix<f64> {
    let b = CMatrix::<f64>::from_fn(n, n, |_, _| Cplx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    if psd {
        &b * b.adjoint()
    } else {
        (&b + b.adjoint()) * Cplx::new(0.5, 0.0)
    }
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counts = [0usize; 2];
    for t in 0..200 {
        let n = rng.random_range(2..=6);
        let e = random_hermitian(&mut rng, n, t % 2 == 0);
        let rep = SchurChannel::new(e).unwrap().certify_cp();
        check(rep.verdicts_agree(), format!("trial {t}: Choi {} vs multiplier {}", rep.choi_min_eigenvalue, rep.multiplier_min_eigenvalue))?;
        counts[usize::from(rep.completely_positive)] += 1;
    }
    let mut worst = 0.0f64;
    let all = commutative_builtins();
    for (name, _, dec) in &all {
        let h = hypergroup::hypergroup_from(dec, &krein_parameters(dec).unwrap()).unwrap();
        for c in 0..h.size() {
            let ch = SchurChannel::from_coin(&h, &Coin::Index(c), CoinScaling::UnitDiagonal).unwrap();
            let (chain, leak) = ch.restricted_chain(dec).unwrap();
            let t = hypergroup::classical_chain(&h, &Coin::Index(c)).unwrap();
            let gap = max_abs_real(&(chain - t)).max(leak);
            check(gap < 1e-9, format!("{name} coin {c}: restriction gap {gap:e}"))?;
            worst = worst.max(gap);
        }
    }
    Ok(format!(
        "Choi verdict = multiplier PSD on 200 multipliers ({} CP, {} not); restriction gap {worst:.1e} on {} schemes",
        counts[1],
        counts[0],
        all.len()
    ))
}

fn random_distribution(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..len).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() }).collect();
    if p.iter().all(|&x| x == 0.0) {
        p[0] = 1.0;
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let len = rng.random_range(2..=16);
        let p = random_distribution(&mut rng, len);
        let u = qmc::dilation_unitary(&p).map_err(|e| e.to_string())?;
        worst = worst.max(max_abs_real(&(u.transpose() * &u - RMatrix::identity(len, len))));
    }
    check(worst < 1e-12, format!("orthogonality defect {worst:e}"))?;
    let u = qmc::dilation_unitary(&[0.5, 0.5]).unwrap();
    let want = RMatrix::from_row_slice(2, 2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
    let gap = max_abs_real(&(u - want));
    check(gap < 1e-15, format!("(1/2,1/2) gap {gap:e}"))?;
    for len in 1..=8 {
        let mut p = vec![0.0; len];
        p[0] = 1.0;
        check(qmc::dilation_unitary(&p).unwrap() == RMatrix::identity(len, len), "point mass does not give I")?;
    }
    Ok(format!("orthogonality defect {worst:.1e} over 1000 distributions; examples exact"))
}

fn random_row_stochastic(rng: &mut ChaCha8Rng, d: usize) -> RMatrix<f64> {
    let rows: Vec<Vec<f64>> = (0..d).map(|_| random_distribution(rng, d)).collect();
    RMatrix::from_fn(d, d, |i, j| rows[i][j])
}

fn random_complex(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix<f64> {
    CMatrix::from_fn(r, c, |_, _| Cplx::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut unital, mut embed) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let d = rng.random_range(2..=5);
        let p = random_row_stochastic(&mut rng, d);
        let te = TransitionExpectation::new(p.clone()).map_err(|e| e.to_string())?;
        let m = random_complex(&mut rng, d, d);
        let n = random_complex(&mut rng, d, d);
        agree = agree.max(max_abs(&(te.apply(&m, &n).unwrap() - te.apply_closed_form(&m, &n).unwrap())));
        let id = CMatrix::<f64>::identity(d, d);
        unital = unital.max(max_abs(&(te.apply(&id, &id).unwrap() - &id)));
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let diag = CMatrix::from_diagonal(&bose_mesner::scalar::to_complex(&RMatrix::from_column_slice(d, 1, &v)).column(0).into_owned());
        let pv = &p * RMatrix::from_column_slice(d, 1, &v);
        let want = CMatrix::from_fn(d, d, |i, j| if i == j { Cplx::new(pv[(i, 0)], 0.0) } else { Cplx::new(0.0, 0.0) });
        embed = embed.max(max_abs(&(te.apply(&id, &diag).unwrap() - want)));
    }
    check(agree < 1e-12, format!("Stinespring vs closed form {agree:e}"))?;
    check(unital < 1e-12, format!("unitality {unital:e}"))?;
    check(embed < 1e-12, format!("classical embedding {embed:e}"))?;
    Ok(format!("closed form gap {agree:.1e}, unitality {unital:.1e}, embedding {embed:.1e}"))
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut unitary, mut proj, mut fixed) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        // strictly positive columns, so the chain is irreducible
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect()
            })
            .collect();
        let d = RMatrix::from_fn(n, n, |w, v| cols[v][w]);
        let w = qmc::szegedy_walk(&d, Stochastic::Column).map_err(|e| e.to_string())?;
        unitary = unitary.max(w.unitarity_defect());
        proj = proj.max(w.projector_defect());
        let s2 = w.swap() * w.swap();
        check(s2 == RMatrix::identity(n * n, n * n), "S² ≠ I")?;
        let pi = qmc::stationary_distribution(&d).map_err(|e| e.to_string())?;
        let psi = w.lift(&pi);
        fixed = fixed.max((w.unitary() * &psi - &psi).amax());
    }
    let structural = format!("unitarity {unitary:.1e}, Π²-Π {proj:.1e}, S² = I exact");
    check(unitary < 1e-10 && proj < 1e-12, structural.clone())?;
    if fixed < 1e-8 {
        Ok(format!("{structural}; A√π fixed within {fixed:.1e}"))
    } else {
        Err(format!(
            "{structural} pass; A√π is not fixed by U: max ‖UA√π - A√π‖ = {fixed:.3} \
             (U A√π = S A√π, fixed only under detailed balance)"
        ))
    }
}

fn criterion_9() -> Verdict {
    let ising = FusionSystem::<f64>::ising();
    let mut expected = vec![vec![vec![0u32; 3]; 3]; 3];
    for (a, b, c) in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (0, 2, 2), (2, 0, 2), (1, 1, 0), (1, 1, 2), (1, 2, 1), (2, 1, 1), (2, 2, 0)] {
        expected[a][b][c] = 1;
    }
    check(ising.fusion_tensor() == expected.as_slice(), "Ising fusion table")?;
    check((ising.dims()[1] - 2f64.sqrt()).abs() < 1e-12, format!("d_σ = {}", ising.dims()[1]))?;
    let fib = FusionSystem::<f64>::fibonacci();
    check((fib.dims()[1] - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12, format!("d_f = {}", fib.dims()[1]))?;
    let mut worst_braid = 0.0f64;
    let mut worst_pent = 0.0f64;
    for fs in [&ising, &fib] {
        let b = anyons::braid_generators(fs).map_err(|e| e.to_string())?;
        check(b.unitarity_defect < 1e-12, format!("braid unitarity {:e}", b.unitarity_defect))?;
        check(b.braid_residual < 1e-10, format!("braid relation {:e}", b.braid_residual))?;
        worst_braid = worst_braid.max(b.braid_residual);
        let p = anyons::verify_pentagon(fs).map_err(|e| e.to_string())?;
        check(p.max_residual < 1e-10, format!("pentagon {:e}", p.max_residual))?;
        worst_pent = worst_pent.max(p.max_residual);
    }
    let s1 = anyons::braid_generators(&ising).unwrap().sigma1;
    let w = Cplx::from_polar(1.0, PI / 8.0);
    check((s1[(0, 0)] - w).norm() < 1e-12 && (s1[(1, 1)] - w * Cplx::new(0.0, 1.0)).norm() < 1e-12, "Ising σ1")?;
    let corrupted = ising.with_f_matrix((1, 2, 1, 2), FMatrix::scalar(1, 1, Cplx::new(1.0, 0.0))).unwrap();
    let bad = anyons::verify_pentagon(&corrupted).unwrap().max_residual;
    check(bad > 0.1, format!("corrupted pentagon residual {bad}"))?;
    Ok(format!("fusion table exact, dims exact, braid residual {worst_braid:.1e}, pentagon {worst_pent:.1e}, corrupted {bad:.2}"))
}

fn criterion_10() -> Verdict {
    let mut devs = Vec::new();
    for k in [2, 3] {
        let g = FiniteGroup::cyclic(k).unwrap();
        let dec = decompose::<f64>(&scheme::build_group_scheme(&g)).unwrap();
        let q = krein_parameters(&dec).unwrap();
        let rep = anyons::scheme_fusion_bridge(&dec, &q, &FusionSystem::group_ring(&g).unwrap()).unwrap();
        check(rep.matched && rep.best.deviation < 1e-10, format!("Z{k} deviation {:e}", rep.best.deviation))?;
        devs.push(rep.best.deviation);
    }
    let dec = decompose::<f64>(&scheme::build_johnson(4, 2).unwrap()).unwrap();
    let q = krein_parameters(&dec).unwrap();
    let rep = anyons::scheme_fusion_bridge(&dec, &q, &FusionSystem::ising()).unwrap();
    check(!rep.matched, "J(4,2) matched Ising")?;
    Ok(format!("Z2/Z3 deviations {:.1e}/{:.1e}; J(4,2) vs Ising deviation {:.3}", devs[0], devs[1], rep.best.deviation))
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bmq").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn random_scheme(rng: &mut ChaCha8Rng) -> AssociationScheme {
    let base = match rng.random_range(0..5) {
        0 => scheme::build_group_scheme(&FiniteGroup::cyclic(rng.random_range(1..=10)).unwrap()),
        1 => scheme::build_conjugacy_scheme(&group(["S3", "D4", "Q8", "S4"][rng.random_range(0..4)])),
        2 => {
            let v = rng.random_range(2..=7);
            scheme::build_johnson(v, rng.random_range(1..=v / 2)).unwrap()
        }
        3 => scheme::build_group_scheme(&group(["S3", "D4", "D5", "Q8"][rng.random_range(0..4)])),
        _ => scheme::build_grassmann(2, rng.random_range(2..=4), 1).unwrap(),
    };
    // relabel vertices
    let n = base.n();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let relation = (0..n).map(|x| (0..n).map(|y| base.class_of(perm[x], perm[y])).collect()).collect();
    AssociationScheme::validated(relation, base.labels().map(<[String]>::to_vec)).unwrap()
}

fn random_fusion(rng: &mut ChaCha8Rng) -> FusionSystem<f64> {
    let base = match rng.random_range(0..4) {
        0 => FusionSystem::ising(),
        1 => FusionSystem::fibonacci(),
        2 => FusionSystem::group_ring(&FiniteGroup::cyclic(rng.random_range(1..=6)).unwrap()).unwrap(),
        _ => {
            let klein = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
            FusionSystem::group_ring(&FiniteGroup::from_cayley(klein).unwrap()).unwrap()
        }
    };
    // random non-vacuum names
    let mut labels = base.labels().to_vec();
    for l in labels.iter_mut().skip(1) {
        *l = format!("{l}_{}", rng.random_range(0..1000));
    }
    labels.dedup();
    if labels.len() != base.rank() {
        return base;
    }
    FusionSystem::new(
        labels,
        base.fusion_tensor().to_vec(),
        base.f_table().cloned(),
        base.r_table().cloned(),
        base.twist().map(<[Cplx<f64>]>::to_vec),
    )
    .unwrap_or(base)
}

fn criterion_11() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let j42 = dir.path().join("j42.json");
    let j42s = j42.to_str().unwrap();
    let (code, _, err) = cli(&["scheme", "build", "--family", "johnson", "--v", "4", "--k", "2", "--out", j42s]);
    check(code == 0, format!("scheme build exit {code}: {err}"))?;
    let built: AssociationScheme = bose_mesner::io::load(&j42).map_err(|e| e.to_string())?;
    check(built == scheme::build_johnson(4, 2).unwrap() && built.n() == 6, "written scheme differs")?;
    let (code, out, err) = cli(&["scheme", "verify", j42s]);
    check(code == 0 && out.trim() == "passed, commutative", format!("verify exit {code}: {out}{err}"))?;
    let (code, out, err) = cli(&["qmc", "dilate", "--dist", "[0.5,0.5]"]);
    let compact: String = out.chars().filter(|c| !c.is_whitespace()).collect();
    check(
        code == 0 && compact == "[[0.70710678,0.70710678],[-0.70710678,0.70710678]]",
        format!("dilate exit {code}: {out}{err}"),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for t in 0..100 {
        let s = random_scheme(&mut rng);
        check(AssociationScheme::from_json_str(&s.to_json_string()).ok() == Some(s), format!("scheme round trip {t}"))?;

        let (r, c) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let m = random_complex(&mut rng, r, c);
        check(CMatrix::<f64>::from_json_str(&m.to_json_string()).ok() == Some(m.clone()), format!("complex matrix {t}"))?;
        let re = m.map(|z| z.re);
        check(RMatrix::<f64>::from_json_str(&re.to_json_string()).ok() == Some(re), format!("real matrix {t}"))?;

        let size = rng.random_range(1..=4);
        let q: Vec<Vec<Vec<f64>>> = (0..size)
            .map(|_| (0..size).map(|_| (0..size).map(|_| rng.random_range(-10.0..10.0)).collect()).collect())
            .collect();
        let kt = KreinTensor::from_entries(q).unwrap();
        check(KreinTensor::<f64>::from_json_str(&kt.to_json_string()).ok() == Some(kt), format!("Krein tensor {t}"))?;
        let p: Vec<Vec<Vec<u64>>> = (0..size)
            .map(|_| (0..size).map(|_| (0..size).map(|_| rng.random_range(0..100)).collect()).collect())
            .collect();
        let it = IntersectionTensor::from_entries(p).unwrap();
        check(IntersectionTensor::from_json_str(&it.to_json_string()).ok() == Some(it), format!("intersection tensor {t}"))?;

        let len = rng.random_range(1..=12);
        let dist = Distribution(random_distribution(&mut rng, len));
        check(Distribution::<f64>::from_json_str(&dist.to_json_string()).ok() == Some(dist), format!("distribution {t}"))?;

        let fs = random_fusion(&mut rng);
        let back = FusionSystem::<f64>::from_json_str(&fs.to_json_string()).map_err(|e| format!("fusion {t}: {e}"))?;
        let same = back.labels() == fs.labels()
            && back.fusion_tensor() == fs.fusion_tensor()
            && back.f_table() == fs.f_table()
            && back.r_table() == fs.r_table()
            && back.twist() == fs.twist();
        check(same, format!("fusion system round trip {t}"))?;
    }
    Ok("three CLI examples reproduce; 100 round trips per kind (scheme, matrix, tensor, distribution, fusion system)".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("scheme axioms", criterion_1),
        ("spectral decomposition", criterion_2),
        ("duality tensors", criterion_3),
        ("hypergroup", criterion_4),
        ("quantum channels", criterion_5),
        ("dilation", criterion_6),
        ("entangled transition expectation", criterion_7),
        ("Szegedy walk", criterion_8),
        ("anyons", criterion_9),
        ("scheme-fusion bridge", criterion_10),
        ("CLI and JSON", criterion_11),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", criteria.len() - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
