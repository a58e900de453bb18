//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero
//! exit if any criterion fails.

use std::path::PathBuf;
use std::process::{Command, Output};

use ccm_core::generate;
use ccm_core::io::{parse_chain, parse_report, serialize_chain, serialize_report, Status};
use ccm_core::spherical::spherical_cycle_residual;
use ccm_core::verify::{self, SuiteConfig, SuiteOutcome};
use ccm_core::{Chain, Point, Simplex, SphericalSimplex, Vector};

const SEED: u64 = 20_240_601;

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: impl Into<String>) -> Line {
    Line {
        passed,
        detail: detail.into(),
    }
}

fn cfg(trials: usize, tol: f64) -> SuiteConfig {
    SuiteConfig {
        trials,
        seed: SEED,
        tol,
    }
}

fn suite(outcome: SuiteOutcome) -> Line {
    line(
        outcome.passed(),
        format!(
            "{}: {} trials, {} failures, max residual {:.3e}, worst residual/tolerance {:.3e}",
            outcome.name, outcome.trials, outcome.failures, outcome.max_residual, outcome.max_ratio
        ),
    )
}

fn all(lines: Vec<Line>) -> Line {
    let passed = lines.iter().all(|l| l.passed);
    let detail = lines
        .into_iter()
        .map(|l| format!("{}{}", if l.passed { "" } else { "FAILED " }, l.detail))
        .collect::<Vec<_>>()
        .join("; ");
    line(passed, detail)
}

fn within(name: &str, got: f64, want: f64, tol: f64) -> Line {
    let err = (got - want).abs();
    line(
        err <= tol,
        format!("{name} = {got:.17e} (expected {want:.17e}, |diff| {err:.2e} <= {tol:.0e})"),
    )
}

fn pts(rows: &[&[f64]]) -> Vec<Point> {
    rows.iter()
        .map(|r| Point::new(r.to_vec()).unwrap())
        .collect()
}

fn pow_closed_forms() -> Line {
    suite(verify::pow_forms(&cfg(1000, 1e-10), &[1, 2, 3, 4, 5, 6]).unwrap())
}

fn pow_monte_carlo() -> Line {
    let mc = suite(verify::pow_mc(&cfg(50, 4.0), &[1, 2, 3, 4], 200_000).unwrap());
    // segment [0, l]: integral of (x - l/2)^2 - l^2/4 is l^3/12 - l^3/4
    let mut checks = vec![mc];
    for l in [1.0, 2.5] {
        let s = Simplex::new(pts(&[&[0.0], &[l]])).unwrap();
        let want = l * l * l / 12.0 - l * l * l / 4.0;
        checks.push(within(
            &format!("Pow(segment {l}) edge form"),
            s.pow_edges(),
            want,
            1e-12,
        ));
        checks.push(within(
            &format!("Pow(segment {l}) radius form"),
            s.pow_circum().unwrap(),
            want,
            1e-12,
        ));
    }
    // unit equilateral triangle: area sqrt(3)/4, edge-square sum 3
    let h = 3f64.sqrt() / 2.0;
    let tri = Simplex::new(pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]])).unwrap();
    let want = -(3f64.sqrt() / 4.0) * 3.0 / 12.0;
    checks.push(within(
        "Pow(unit triangle) edge form",
        tri.pow_edges(),
        want,
        1e-12,
    ));
    checks.push(within(
        "Pow(unit triangle) radius form",
        tri.pow_circum().unwrap(),
        want,
        1e-12,
    ));
    all(checks)
}

fn lemma() -> Line {
    let random = suite(verify::lemma(&cfg(1000, 1e-9), &[2, 3, 4, 5]).unwrap());
    // right triangle: hypotenuse Pow -(sqrt2)^3/6 along (1,1)/sqrt2, legs
    // Pow -1/6 along (0,-1) and (-1,0): sum (-1/6, -1/6)
    let s = Simplex::new(pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]])).unwrap();
    let mut sum = Vector::zeros(2);
    for (face, n) in s.hyperfaces_with_normals().unwrap() {
        sum.add_scaled(face.pow_edges(), &n);
    }
    let c = sum.components();
    all(vec![
        random,
        within("right triangle sum Pow n (x)", c[0], -1.0 / 6.0, 1e-14),
        within("right triangle sum Pow n (y)", c[1], -1.0 / 6.0, 1e-14),
    ])
}

fn cycle_moments() -> Line {
    suite(verify::cycle_moments(&cfg(200, 1e-9), &[2, 3]).unwrap())
}

fn filling_independence() -> Line {
    suite(verify::filling_independence(&cfg(200, 1e-9), &[2, 3]).unwrap())
}

fn equilateral_polygons() -> Line {
    suite(verify::equilateral_polygon(&cfg(200, 1e-9)).unwrap())
}

fn equilateral_polytopes() -> Line {
    let mut checks = Vec::new();
    for (name, shape) in [
        ("bipyramid", generate::unit_bipyramid()),
        ("octahedron", generate::unit_octahedron()),
        ("icosahedron", generate::unit_icosahedron()),
    ] {
        // off-center so the symmetric answer is not the origin
        let moved = shape.translated(&Vector::from([0.3, -1.7, 2.9])).unwrap();
        let c = verify::equilateral_polytope_check(&moved, 1e-9).unwrap();
        checks.push(line(
            c.ok(),
            format!("{name} |ccm - centroid| = {:.3e}", c.residual),
        ));
    }
    checks.push(suite(verify::equilateral_polytope(&cfg(20, 1e-9)).unwrap()));
    all(checks)
}

fn minkowski() -> Line {
    suite(verify::minkowski(&cfg(100, 1e-9)).unwrap())
}

fn inscribed() -> Line {
    suite(verify::inscribed(&cfg(100, 1e-9), &[2, 3]).unwrap())
}

fn unit_sphere_image(c: &Chain) -> Chain {
    c.map_points(|p| p.to_vector().normalized().unwrap().to_point())
        .unwrap()
}

fn spherical() -> Line {
    let octant = SphericalSimplex::from_vectors(&[
        Vector::from([1.0, 0.0, 0.0]),
        Vector::from([0.0, 1.0, 0.0]),
        Vector::from([0.0, 0.0, 1.0]),
    ])
    .unwrap();
    // lift 0 e1 e2 e3: circumcenter (1/2,1/2,1/2), volume 1/6
    let w = octant.weighted_circumcenter().unwrap();
    let dir = w.center.unwrap();
    let expected = 1.0 / 3f64.sqrt();
    let dir_err = dir
        .direction()
        .components()
        .iter()
        .map(|x| (x - expected).abs())
        .fold(0.0, f64::max);
    let mut checks = vec![
        line(
            dir_err <= 1e-12,
            format!("octant center error {dir_err:.2e} <= 1e-12"),
        ),
        within("octant mass", w.mass, 3f64.sqrt() / 2.0 / 6.0, 1e-12),
        suite(verify::chordal_identity(&cfg(500, 1e-10), &[1, 2, 3, 4]).unwrap()),
        suite(verify::spherical_cycle(&cfg(100, 1e-9)).unwrap()),
    ];
    for (name, shape) in [
        ("octahedral", generate::unit_octahedron()),
        ("icosahedral", generate::unit_icosahedron()),
    ] {
        let r = spherical_cycle_residual(&unit_sphere_image(&shape))
            .unwrap()
            .norm();
        checks.push(line(
            r <= 1e-12,
            format!("{name} triangulation residual {r:.3e} <= 1e-12"),
        ));
    }
    all(checks)
}

fn ccm_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ccm"))
}

fn run(args: &[&str]) -> Output {
    ccm_bin().args(args).output().expect("run ccm")
}

fn scratch(name: &str, bytes: &[u8]) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ccm-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, bytes).unwrap();
    path
}

fn cli() -> Line {
    let mut checks = Vec::new();

    // chain files: parse -> serialize -> parse is the identity, bytes stable
    let mut rng = ccm_core::rng::stream_rng(SEED, 0);
    let chain = generate::random_convex_polytope(&mut rng, 3, 14).unwrap();
    let bytes = serialize_chain(&chain);
    let back = parse_chain(&bytes).unwrap();
    checks.push(line(
        back == chain.canonicalize(),
        "chain parse(serialize(c)) == c",
    ));
    checks.push(line(
        serialize_chain(&back) == bytes,
        "chain serialize bytes stable",
    ));

    // reports from the binary: bit-identical across runs and through a round trip
    let file = scratch("polytope.json", &bytes);
    let file = file.to_str().unwrap();
    let args = [
        "verify", "lemma", "--dim", "3", "--trials", "1000", "--seed", "7",
    ];
    let (a, b) = (run(&args), run(&args));
    checks.push(line(
        a.status.code() == Some(0),
        "verify lemma --seed 7 exits 0",
    ));
    checks.push(line(
        a.stdout == b.stdout,
        "verify lemma reports bit-identical",
    ));
    let mc = [
        "pow",
        file,
        "--oracle",
        "mc",
        "--samples",
        "200000",
        "--seed",
        "1",
    ];
    let (c, d) = (run(&mc), run(&mc));
    checks.push(line(
        c.stdout == d.stdout && c.status.code() == Some(0),
        "pow --oracle mc bit-identical, exit 0",
    ));
    for (name, out) in [("verify", &a), ("pow", &c)] {
        let ok = parse_report(&out.stdout).is_ok_and(|r| serialize_report(&r) == out.stdout);
        checks.push(line(
            ok,
            format!("{name} report parse -> serialize bit-exact"),
        ));
    }

    // exit-code contract
    let fail = run(&[
        "verify", "lemma", "--dim", "3", "--trials", "50", "--seed", "7", "--tol", "1e-30",
    ]);
    let status = parse_report(&fail.stdout).map(|r| r.status);
    checks.push(line(
        fail.status.code() == Some(1) && status == Ok(Status::Fail),
        format!(
            "--tol 1e-30 gives status fail and exit {:?}",
            fail.status.code()
        ),
    ));
    let bad = scratch(
        "bad.json",
        br#"{"dimension": 2, "vertices": [[0, 0], [1, 0]"#,
    );
    let err = run(&["ccm", bad.to_str().unwrap()]);
    let status = parse_report(&err.stdout).map(|r| r.status);
    checks.push(line(
        err.status.code() == Some(2) && status == Ok(Status::Error),
        format!(
            "unparsable input gives status error and exit {:?}",
            err.status.code()
        ),
    ));
    let usage = run(&["verify", "lemma"]);
    checks.push(line(
        usage.status.code() == Some(2),
        "missing --seed is a usage error (exit 2)",
    ));

    // the unit square through the binary
    let square = scratch("square.json", br#"{"polygon": [[0,0],[1,0],[1,1],[0,1]]}"#);
    let out = run(&["ccm", square.to_str().unwrap()]);
    let point = parse_report(&out.stdout)
        .ok()
        .and_then(|r| r.results.get("point").cloned());
    checks.push(line(
        point == Some(serde_json::json!([0.5, 0.5])),
        "ccm of the unit square is [0.5, 0.5]",
    ));

    all(checks)
}

type Criterion = (&'static str, fn() -> Line);

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "power closed forms agree and are negative",
            pow_closed_forms,
        ),
        (
            "power Monte Carlo oracle and analytic values",
            pow_monte_carlo,
        ),
        ("facet power identity", lemma),
        ("cycle moments vanish", cycle_moments),
        ("filling independence", filling_independence),
        (
            "equilateral polygons: ccm is the lamina centroid",
            equilateral_polygons,
        ),
        (
            "equilateral-facet polytopes: ccm is the solid centroid",
            equilateral_polytopes,
        ),
        ("area-weighted normals sum to zero", minkowski),
        ("inscribed polytopes: ccm is the sphere center", inscribed),
        ("spherical circumcenter of mass", spherical),
        ("command line: round trips, determinism, exit codes", cli),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let l = check();
        if !l.passed {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if l.passed { "PASS" } else { "FAIL" },
            i + 1,
            l.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
