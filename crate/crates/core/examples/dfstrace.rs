fn main() {
    use stable_centres::*;
    let ctx = groups::GroupCtx::in_memory();
    let form6 = forms::standard_gram(types::Family::Sp, 3, 3).unwrap();
    let ct4 = ctx.classes(types::Family::Sp, 3, 2).unwrap();
    let g4t = ctx.group(types::Family::Sp, 3, 2).unwrap();
    let info = ct4.classes.iter().find(|i| i.label.to_string() == "sp,q=3;t+1:(2,1,1)").unwrap();
    let rep = matfq::MatFq::unpack_u64(g4t.field.clone(), 4, 4, info.min_rep);
    let emb = rep.block_embed(2);
    let dfs = forms::enumerate_centralizer(&form6, &emb, 100_000_000).unwrap();
    println!("dfs count = {}", dfs.len());
    // build C_{Sp_4}(g) x Sp_2 and check membership
    let c4 = g4t.centralizer_elements(&rep).unwrap();
    let sp2 = ctx.group(types::Family::Sp, 3, 1).unwrap();
    let mut missing = 0;
    let mut shown = 0;
    for &ai in &c4 {
        let a = g4t.el(ai);
        for bw in 0..sp2.order() as u32 {
            let b = sp2.el(bw);
            let mut x = matfq::MatFq::identity(form6.field.clone(), 6);
            for i in 0..4 { for j in 0..4 { x.set(i, j, a.get(i, j)); } }
            for i in 0..2 { for j in 0..2 { x.set(4 + i, 4 + j, b.get(i, j)); } }
            assert!(forms::is_isometry(&x, &form6));
            assert_eq!(x.mul(&emb), emb.mul(&x));
            if dfs.binary_search(&x.pack_u128()).is_err() {
                missing += 1;
                if shown < 2 {
                    println!("missing element:\n{:?}", x);
                    shown += 1;
                }
            }
        }
    }
    println!("missing from dfs: {missing} of {}", c4.len() * sp2.order());
}
