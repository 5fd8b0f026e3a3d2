fn main() {
    use stable_centres::*;
    use num::BigRational;
    use num::BigInt;
    let ctx = groups::GroupCtx::in_memory();
    let q = 3u64; let level = 2usize;
    let group = ctx.group(types::Family::Sp, q, level).unwrap();
    let ct = ctx.classes(types::Family::Sp, q, level).unwrap();
    let big_form = forms::standard_gram(types::Family::Sp, level + 1, q).unwrap();
    let tm1 = group.tm1();
    for info in ct.classes.iter() {
        let rep = matfq::MatFq::unpack_u64(group.field.clone(), group.dim, group.dim, info.min_rep);
        let small = info.centralizer;
        let emb = rep.block_embed(2);
        let want = centrformulas::sp_ratio(&info.gl_type, &tm1, 2, q).unwrap();
        let scalar = (0..group.dim).all(|i| (0..group.dim).all(|j| emb.get(i, j) == if i == j { emb.get(0,0) } else { 0 }));
        if scalar { continue; }
        let large = forms::enumerate_centralizer(&big_form, &emb, 100_000_000).unwrap().len() as u64;
        let got = BigRational::new(BigInt::from(large), BigInt::from(small));
        if got != want {
            println!("MISMATCH {} type {} small {} large {} got {} want {}", info.label, info.gl_type, small, large, got, want);
        }
    }
    println!("done");
}
