fn main() {
    use stable_centres::*;
    let ctx = groups::GroupCtx::in_memory();
    let (family, q, level) = (types::Family::Sp, 3u64, 2usize);
    let form = forms::standard_gram(family, level, q).unwrap();
    let table = ctx.group(family, q, level).unwrap();
    let ct = ctx.classes(family, q, level).unwrap();
    let mut bad = 0;
    for info in &ct.classes {
        let g = matfq::MatFq::unpack_u64(form.field.clone(), form.dim, form.dim, info.min_rep);
        let fast = forms::enumerate_centralizer(&form, &g, 10_000_000).unwrap();
        if fast.len() as u64 != info.centralizer {
            bad += 1;
            println!("MISMATCH class {}: dfs {} scan {}", info.label, fast.len(), info.centralizer);
        }
    }
    println!("done, {bad} mismatches over {} classes", ct.classes.len());
    let _ = table;
}
