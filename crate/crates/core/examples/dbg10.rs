fn main() {
    use stable_centres::*;
    let ctx = groups::GroupCtx::in_memory();
    for (family, q, level) in [
        (types::Family::U, 2u64, 2usize),
        (types::Family::Sp, 2, 1),
        (types::Family::Sp, 3, 1),
        (types::Family::OOdd, 3, 1),
    ] {
        let pairs = bounding::enumerate_bp(&ctx, family, q, level).unwrap();
        let (orbit, reps) = bounding::bp_orbits(&ctx, family, q, level, &pairs).unwrap();
        let _ = orbit;
        for &ri in &reps {
            let p = &pairs[ri];
            let inv = p.invariants().unwrap();
            match bounding::calibrate_k_pair(&ctx, p) {
                Ok(_) => {}
                Err(e) => {
                    let p0 = bounding::orbit_count_pair(&ctx, p, p.min_level()).unwrap();
                    println!("CALIB FAIL {family:?} q={q} orbit {ri}: {e}");
                    println!("  g type {} v dim {} a={} r={} h={} k={} germ={:?} min_level={} P0={}",
                        inv.type_r, p.v.dim(), inv.a, inv.r, inv.h, inv.k, inv.germ_v, p.min_level(), p0);
                }
            }
        }
    }
    println!("done");
}
