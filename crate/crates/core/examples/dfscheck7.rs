fn main() {
    use stable_centres::*;
    let ctx = groups::GroupCtx::in_memory();
    let form6 = forms::standard_gram(types::Family::Sp, 3, 2).unwrap();
    let big = ctx.group(types::Family::Sp, 2, 3).unwrap();
    let ct4 = ctx.classes(types::Family::Sp, 2, 2).unwrap();
    let g4 = ctx.group(types::Family::Sp, 2, 2).unwrap();
    let mut bad = 0;
    for info in ct4.classes.iter() {
        let rep = matfq::MatFq::unpack_u64(g4.field.clone(), 4, 4, info.min_rep);
        let emb = rep.block_embed(2);
        let fast = forms::enumerate_centralizer(&form6, &emb, 100_000_000).unwrap();
        let slow = big.centralizer_size_scan(&emb).unwrap();
        if fast.len() as u64 != slow {
            bad += 1;
            println!("MISMATCH {}: dfs {} scan {}", info.label, fast.len(), slow);
        }
    }
    println!("done, {bad} mismatches over {} classes", ct4.classes.len());
}
