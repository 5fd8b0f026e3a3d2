fn main() {
    let ctx = stable_centres::groups::GroupCtx::in_memory();
    let t0 = std::time::Instant::now();
    let check = stable_centres::cli::ratio_check_sp_deep(&ctx, 3, 2, 200_000_000).unwrap();
    println!("{} passed={} detail={} in {:?}", check.name, check.passed, check.detail, t0.elapsed());
}
