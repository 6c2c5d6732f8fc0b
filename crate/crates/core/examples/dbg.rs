use uhull::membership::sweep::*;
use uhull::model::*;
use uhull::geom::Point;
use uhull::scalar::{Rat, format_rat};

fn main() {
    let mut rng = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        rng
    };
    for trial in 0..3 {
        let n = 3 + (next() % 5) as usize;
        let sites: Vec<(Point, Rat)> = (0..n)
            .map(|_| {
                let x = (next() % 2001) as i64 - 1000;
                let y = (next() % 2001) as i64 - 1000;
                let p = 1 + (next() % 99) as i64;
                (Point::from_i64(&[x, y]), Rat::new(p.into(), 100.into()))
            })
            .collect();
        let m = UncertainPointSet::unipoint(2, sites.clone());
        if m.validate_general_position().is_err() { println!("trial {trial}: gp reject"); continue; }
        let q = Point::from_i64(&[(next() % 801) as i64 - 400, (next() % 801) as i64 - 400]);
        println!("trial {trial}: q={} sites:", q);
        for (p, pr) in &sites { println!("   {} p={}", p, format_rat(pr)); }
        let dec: WitnessDecomposition<Rat> = match membership_decomposed(&q, &m) {
            Ok(d) => d, Err(e) => { println!("   err {e}"); continue; }
        };
        for (site, w) in &dec.witness {
            let direct: Rat = witness_edge_probability(&q, *site, &m).unwrap();
            println!("   site {:?}: sweep={} direct={} {}", site, format_rat(w), format_rat(&direct), if *w==direct {"OK"} else {"MISMATCH"});
        }
        let oracle = brute_force_membership(&q, &m, DEFAULT_OUTCOME_CAP).unwrap();
        println!("   pi sweep={} oracle={}", format_rat(&dec.membership), format_rat(&oracle));
    }
}
