//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Timings assume the optimized test profile.

use std::alloc::{GlobalAlloc, Layout, System};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qml::chord::{find_crossing, psi};
use qml::minor::{length_drop_check, first_hit, DropCheck};
use qml::oracle::{directed_distance, enumerate_periodic_minors};
use qml::svg::{render_leaves, RenderConfig, SvgLeaf};
use qml::tuning::{qml_approx, tune_angle, tune_chord, TuningWords};
use qml::{
    build_lamination, cardioid_edges, children, is_stand_alone_minor, offspring, qml_nr_approx, Angle,
    Behind, Chord, MinorRecord, Rational,
};

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOC: Counting = Counting;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(s: &str) -> Chord {
    s.parse().unwrap()
}

fn minor(s: &str) -> MinorRecord {
    is_stand_alone_minor(&c(s)).unwrap_or_else(|r| panic!("{r}"))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn within(label: &str, elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("{label} took {elapsed:.2?}, limit {limit:?}"))
    }
}

/// A chord as plain integer fractions, for arithmetic done outside the
/// library.
#[derive(Clone, Copy)]
struct Raw {
    a: (u64, u64),
    b: (u64, u64),
}

impl Raw {
    fn chord(self) -> Chord {
        Chord::from_fractions(self.a, self.b)
    }

    /// Length as (numerator, denominator) over the common denominator.
    fn length(self) -> (u128, u128) {
        let d = u128::from(self.a.1) * u128::from(self.b.1);
        let x = u128::from(self.a.0) * u128::from(self.b.1);
        let y = u128::from(self.b.0) * u128::from(self.a.1);
        let diff = x.abs_diff(y);
        (diff.min(d - diff), d)
    }

    fn double(self) -> Raw {
        Raw { a: ((2 * self.a.0) % self.a.1, self.a.1), b: ((2 * self.b.0) % self.b.1, self.b.1) }
    }
}

fn random_chords(n: usize) -> Vec<Raw> {
    let mut rng = StdRng::seed_from_u64(0x51a7);
    let mut point = move || {
        let d = rng.gen_range(1..=1u64 << 16);
        (rng.gen_range(0..d), d)
    };
    (0..n).map(|_| Raw { a: point(), b: point() }).collect()
}

fn ratio((n, d): (u128, u128)) -> Rational {
    let g = num_integer::gcd(n, d).max(1);
    Rational::new((n / g) as u64, (d / g) as u64)
}

fn criterion_1() -> Outcome {
    let chords = random_chords(10_000);
    let (violations, elapsed) = timed(|| {
        let mut bad = Vec::new();
        for raw in &chords {
            let ch = raw.chord();
            let lib = ch.sigma().length();
            let law = psi(&ch.length()).map_err(|e| e.to_string())?;
            let (l, d) = raw.length();
            let by_hand = if 4 * l <= d { (2 * l, d) } else { (d - 2 * l, d) };
            let image = raw.double().length();
            if lib != law || lib != ratio(by_hand) || lib != ratio(image) {
                bad.push(ch.to_string());
            }
        }
        Ok::<_, String>(bad)
    });
    let violations = violations?;
    if !violations.is_empty() {
        return Err(format!("{} violations, first {}", violations.len(), violations[0]));
    }
    within("10,000 chords", elapsed, Duration::from_secs(1))?;
    Ok(format!("10000 chords, 0 violations, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let mut worst = 0;
    let mut checked = 0;
    for raw in random_chords(10_000) {
        let mut cur = raw;
        if cur.length().0 == 0 {
            continue;
        }
        checked += 1;
        let reached = (0..=40).find(|_| {
            let (l, d) = cur.length();
            let hit = 3 * l >= d;
            cur = cur.double();
            hit
        });
        match reached {
            Some(n) => worst = worst.max(n),
            None => return Err(format!("{} stays below 1/3 for 40 iterations", raw.chord())),
        }
        let lib = (0..=40).find(|&n| raw.chord().sigma_n(n).length() >= Rational::new(1, 3));
        if lib != reached {
            return Err(format!("library and integer orbits disagree on {}", raw.chord()));
        }
    }
    Ok(format!("{checked} non-degenerate chords, 0 violations, worst n = {worst}"))
}

fn criterion_3() -> Outcome {
    // Number of period-q components of the Mandelbrot set interior.
    let expected = [1, 3, 6, 15, 27, 63, 120];
    let (reports, elapsed) = timed(|| (2..=8).map(enumerate_periodic_minors).collect::<Result<Vec<_>, _>>());
    let reports = reports.map_err(|e| e.to_string())?;
    for (r, &n) in reports.iter().zip(&expected) {
        if r.accepted.len() != n {
            return Err(format!("period {}: {} accepted, expected {n}", r.period, r.accepted.len()));
        }
        if let Some((i, j)) = find_crossing(&r.accepted) {
            return Err(format!("period {}: {} crosses {}", r.period, r.accepted[i], r.accepted[j]));
        }
    }
    if reports[0].accepted != vec![c("1/3-2/3")] {
        return Err(format!("period 2: {:?}", reports[0].accepted));
    }
    let mut three = reports[1].accepted.clone();
    three.sort();
    let mut want = vec![c("1/7-2/7"), c("5/7-6/7"), c("3/7-4/7")];
    want.sort();
    if three != want {
        return Err(format!("period 3: {three:?}"));
    }
    within("oracle q = 2..8", elapsed, Duration::from_secs(30))?;
    Ok(format!("accepted counts {expected:?}, {elapsed:.2?}"))
}

fn hits_endpoint(a: &Angle, m: &Chord) -> bool {
    let info = a.orbit_info();
    info.orbit.iter().any(|x| m.has_endpoint(x))
}

fn criterion_4() -> Outcome {
    let edges = cardioid_edges(4).map_err(|e| e.to_string())?;
    let (result, elapsed) = timed(|| {
        let mut tested = 0;
        for edge in &edges {
            let m = &edge.minor;
            let q = edge.rotation.q;
            let mut angles = Vec::new();
            for k in 1..=5u32 {
                let den = (1u64 << k) * ((1u64 << q) - 1);
                angles.extend((0..den).map(|j| Angle::new(j, den)));
            }
            angles.sort();
            angles.dedup();
            for a in angles {
                let strictly = Chord::point(a.clone()).behind(m.chord()).map_err(|e| e.to_string())?
                    == Behind::Strictly;
                if !strictly || a.is_periodic() || !hits_endpoint(&a, m.chord()) {
                    continue;
                }
                tested += 1;
                let o = offspring(m, &a).map_err(|e| format!("{} at {a}: {e}", m.chord()))?;
                let ch = o.chord();
                if !ch.has_endpoint(&a) {
                    return Err(format!("offspring {ch} of {} misses {a}", m.chord()));
                }
                if is_stand_alone_minor(ch).is_err() {
                    return Err(format!("offspring {ch} is not stand-alone"));
                }
                if first_hit(ch, m.chord()).is_none() {
                    return Err(format!("offspring {ch} never maps onto {}", m.chord()));
                }
            }
        }
        Ok::<_, String>(tested)
    });
    let tested = result?;
    if tested == 0 {
        return Err("no angles tested".into());
    }
    within("offspring suite", elapsed, Duration::from_secs(60))?;
    Ok(format!("{} edges, {tested} angles, 100% pass, {elapsed:.2?}", edges.len()))
}

fn criterion_5() -> Outcome {
    let (result, elapsed) = timed(|| -> Result<(usize, usize, usize), String> {
        let nr: Vec<Chord> =
            qml_nr_approx(6, 3, 8).map_err(|e| e.to_string())?.into_iter().map(|l| l.minor.chord().clone()).collect();
        let tuned: Vec<Chord> =
            qml_approx(6, 3, 8, 1).map_err(|e| e.to_string())?.iter().map(|m| m.chord().clone()).collect();
        let mut all = nr.clone();
        all.extend(tuned.iter().cloned());
        for q in 2..=6 {
            all.extend(enumerate_periodic_minors(q).map_err(|e| e.to_string())?.accepted);
        }
        all.sort();
        all.dedup();
        if let Some((i, j)) = find_crossing(&all) {
            return Err(format!("{} crosses {}", all[i], all[j]));
        }
        Ok((nr.len(), tuned.len(), all.len()))
    });
    let (nr, tuned, total) = result?;
    Ok(format!("{nr} non-renormalizable, {tuned} with one tuning level, {total} distinct, 0 crossings, {elapsed:.2?}"))
}

fn criterion_6() -> Outcome {
    let mut points = Vec::new();
    for d in 1..=63u64 {
        for n in 0..d {
            if num_integer::gcd(n, d) == 1 {
                points.push(Angle::new(n, d));
            }
        }
    }
    let (mut holds, mut no_drop, mut skipped) = (0, 0, 0);
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            match length_drop_check(&Chord::new(x.clone(), y.clone())) {
                DropCheck::Holds { .. } => holds += 1,
                DropCheck::NoDrop => no_drop += 1,
                DropCheck::NotApplicable => skipped += 1,
                DropCheck::Violated { n, reason } => {
                    return Err(format!("{x}-{y}, drop at {n}: {reason}"));
                }
            }
        }
    }
    if holds == 0 {
        return Err("no chord with a drop satisfied SA1 and SA2".into());
    }
    Ok(format!("{holds} drops checked, {no_drop} without drop, {skipped} outside SA1-SA2, 0 violations"))
}

/// Value of a purely periodic angle after replacing each binary digit by a
/// word, by long division and a geometric series.
fn substituted_periodic(theta: (u64, u64), w0: &str, w1: &str) -> Angle {
    let (mut n, d) = theta;
    let mut bits = String::new();
    let start = n;
    loop {
        n *= 2;
        bits.push(if n >= d { '1' } else { '0' });
        n %= d;
        if n == start {
            break;
        }
    }
    let word: String = bits.chars().map(|b| if b == '1' { w1 } else { w0 }).collect();
    let value = u64::from_str_radix(&word, 2).unwrap();
    Angle::new(value, (1u64 << word.len()) - 1)
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let angles: Vec<Angle> = (0..200)
        .map(|_| {
            let d = rng.gen_range(1..=500u64);
            Angle::new(rng.gen_range(0..d), d)
        })
        .collect();
    for base in ["1/3-2/3", "1/7-2/7"] {
        let w = TuningWords::new(minor(base)).map_err(|e| e.to_string())?;
        let p = w.word_length() as usize;
        for theta in &angles {
            let lhs = tune_angle(&w, theta).double_n(p);
            let rhs = tune_angle(&w, &theta.double());
            if lhs != rhs {
                return Err(format!("base {base}, angle {theta}: {lhs} != {rhs}"));
            }
        }
    }

    let w = TuningWords::new(minor("1/7-2/7")).map_err(|e| e.to_string())?;
    let tuned = tune_chord(&w, &c("1/3-2/3")).map_err(|e| e.to_string())?;
    let by_hand = Chord::new(
        substituted_periodic((1, 3), &w.word0(), &w.word1()),
        substituted_periodic((2, 3), &w.word0(), &w.word1()),
    );
    let period6 = enumerate_periodic_minors(6).map_err(|e| e.to_string())?.accepted;
    if tuned.chord() != &c("10/63-17/63") || &by_hand != tuned.chord() || !period6.contains(tuned.chord()) {
        return Err(format!("tuned basilica is {}, substitution gives {by_hand}", tuned.chord()));
    }

    let edges = cardioid_edges(6).map_err(|e| e.to_string())?;
    let mut verified = 0;
    for base in ["1/3-2/3", "1/7-2/7"] {
        let w = TuningWords::new(minor(base)).map_err(|e| e.to_string())?;
        for edge in &edges {
            let t = tune_chord(&w, edge.minor.chord()).map_err(|e| e.to_string())?;
            if let Err(r) = is_stand_alone_minor(t.chord()) {
                return Err(format!("{base} tunes {} to a non-minor: {r}", edge.minor.chord()));
            }
            verified += 1;
        }
    }
    Ok(format!("400 semiconjugacy checks, 1/7-2/7 * 1/3-2/3 = 10/63-17/63, {verified} tuned cardioid edges accepted"))
}

fn criterion_8() -> Outcome {
    let mut sizes = Vec::new();
    let mut basilica_time = Duration::ZERO;
    for seed in ["0", "1/3-2/3", "1/7-2/7", "3/7-4/7"] {
        let m = minor(seed);
        let orbit = m.orbit_chords();
        let (lam, elapsed) = timed(|| build_lamination(&m, 10));
        let lam = lam.map_err(|e| e.to_string())?;
        if seed == "1/3-2/3" {
            basilica_time = elapsed;
        }
        if let Some((i, j)) = find_crossing(lam.leaves()) {
            return Err(format!("{seed}: {} crosses {}", lam.leaves()[i], lam.leaves()[j]));
        }
        for l in lam.leaves() {
            if !lam.contains(&l.sibling()) {
                return Err(format!("{seed}: sibling of {l} missing"));
            }
            let img = l.sigma();
            if !lam.contains(&img) && !orbit.contains(&img) {
                return Err(format!("{seed}: image of {l} missing"));
            }
        }
        let prev = build_lamination(&m, 9).map_err(|e| e.to_string())?;
        if let Some(l) = prev.leaves().iter().find(|l| !lam.contains(l)) {
            return Err(format!("{seed}: {l} at depth 9 is gone at depth 10"));
        }
        sizes.push(format!("{seed}: {}", lam.len()));
    }
    within("depth-10 basilica", basilica_time, Duration::from_secs(5))?;
    Ok(format!("leaves {}; basilica in {basilica_time:.2?}", sizes.join(", ")))
}

fn criterion_9() -> Outcome {
    let root = minor("1/3-2/3");
    let airplane = [c("3/7-4/7")];
    let mut distances = Vec::new();
    for (g, d) in [(2, 6), (3, 8), (4, 10)] {
        let tree = children(&root, g, d).map_err(|e| e.to_string())?;
        let chords: Vec<Chord> = tree.chords().cloned().collect();
        distances.push(directed_distance(&airplane, &chords).map_err(|e| e.to_string())?);
    }
    let shown: Vec<String> = distances.iter().map(|x| format!("{x} ~ {:.5}", x.to_f64())).collect();
    if distances.windows(2).any(|w| w[1] > w[0]) {
        return Err(format!("distances increase: {}", shown.join(", ")));
    }
    Ok(format!("distances {}", shown.join(", ")))
}

fn criterion_10() -> Outcome {
    let baseline = CURRENT.load(Ordering::Relaxed);
    PEAK.store(baseline, Ordering::Relaxed);
    let (leaves, gen_time) = timed(|| qml_nr_approx(7, 3, 12));
    let leaves = leaves.map_err(|e| e.to_string())?;
    let svg_leaves: Vec<SvgLeaf> = leaves
        .iter()
        .map(|l| SvgLeaf {
            chord: l.minor.chord().clone(),
            period: Some(l.minor.period()),
            generation: Some(l.generation),
        })
        .collect();
    let (svg, svg_time) = timed(|| render_leaves(&svg_leaves, &RenderConfig::default()));
    let svg = svg.map_err(|e| e.to_string())?;
    let peak = PEAK.load(Ordering::Relaxed) - baseline;
    let mib = peak as f64 / (1 << 20) as f64;

    if leaves.len() < 10_000 {
        return Err(format!("only {} minors", leaves.len()));
    }
    if svg.matches("class=\"leaf\"").count() != leaves.len() {
        return Err("SVG leaf count differs from the minor count".into());
    }
    within("qml_nr_approx(7, 3, 12)", gen_time, Duration::from_secs(30))?;
    within("SVG render", svg_time, Duration::from_secs(2))?;
    if peak >= 1 << 30 {
        return Err(format!("peak heap {mib:.0} MiB"));
    }
    Ok(format!(
        "{} minors in {gen_time:.2?}, SVG in {svg_time:.2?}, peak heap {mib:.0} MiB",
        leaves.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("psi-law", criterion_1),
        ("length reaches 1/3", criterion_2),
        ("oracle exactness", criterion_3),
        ("offspring suite", criterion_4),
        ("minors do not cross", criterion_5),
        ("central strip", criterion_6),
        ("tuning", criterion_7),
        ("lamination invariants", criterion_8),
        ("approximation monotonicity", criterion_9),
        ("performance", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
