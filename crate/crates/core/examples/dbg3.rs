fn main() {
    use stable_centres::*;
    use num::{BigInt, BigRational, ToPrimitive};
    let ctx = groups::GroupCtx::in_memory();
    let q = 3u64; let level = 2usize;
    let group = ctx.group(types::Family::Sp, q, level).unwrap();
    let ct = ctx.classes(types::Family::Sp, q, level).unwrap();
    let tm1 = group.tm1();
    for info in ct.classes.iter() {
        let rep = matfq::MatFq::unpack_u64(group.field.clone(), group.dim, group.dim, info.min_rep);
        let emb = rep.block_embed(2);
        let scalar = (0..group.dim+2).all(|i| (0..group.dim+2).all(|j| emb.get(i, j) == if i == j { emb.get(0,0) } else { 0 }));
        if !scalar { continue; }
        let small = group.centralizer_size_scan(&rep).unwrap();
        let want = centrformulas::sp_ratio(&info.gl_type, &tm1, 2, q).unwrap();
        let large = centrformulas::sp_order(2 * (level as u64 + 1), q).unwrap().to_u64().unwrap();
        let got = BigRational::new(BigInt::from(large), BigInt::from(small));
        println!("scalar class {} small {} large {} got {} want {} match {}", info.label, small, large, got, want, got == want);
    }
}
