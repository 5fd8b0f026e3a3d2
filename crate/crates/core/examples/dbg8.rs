fn main() {
    use stable_centres::*;
    let ctx = groups::GroupCtx::in_memory();
    let mu = types::label_parse("oodd,q=3;").unwrap();
    let nu = types::label_parse("oodd,q=3;t+2:(1,1)").unwrap();
    for n in [0usize, 1, 2] {
        println!("rank {n}: mu realized {} nu realized {}",
            classalg::label_realized(&ctx, &mu, n).unwrap(),
            classalg::label_realized(&ctx, &nu, n).unwrap());
        let exp = classalg::expansion(&ctx, types::Family::OOdd, 3, n, &mu, &nu).unwrap();
        for (l, c) in &exp { println!("   {l} -> {c}"); }
    }
    let fits = interp::interpolate_pair(&ctx, &mu, &nu, &[0, 1], &[2]).unwrap();
    for f in &fits {
        println!("lambda {} points {:?} coeffs {:?} holdout {:?} insufficient {}",
            f.lambda, f.fit.points, f.fit.coefficients,
            f.fit.holdout.iter().map(|h| (h.rank, h.actual.clone(), h.predicted.clone(), h.matched)).collect::<Vec<_>>(),
            f.fit.insufficient_points);
    }
}
