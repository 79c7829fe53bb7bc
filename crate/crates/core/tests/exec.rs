use qlocal::gallery::{random_channel, random_product_channel};
use qlocal::locality::{theorem1_factorize, theorem3_factorize};
use qlocal::tensorlab::haar_state;
use qlocal::{BipartiteDims, Exec, PipelineConfig, VerdictReport};

fn same(a: &VerdictReport, b: &VerdictReport) {
    assert_eq!(a.premise_status, b.premise_status);
    assert_eq!(a.residuals, b.residuals);
    assert_eq!(a.witnesses.len(), b.witnesses.len());
    for (x, y) in a.witnesses.iter().zip(&b.witnesses) {
        assert_eq!(x.label, y.label);
        assert_eq!(x.deviation.to_bits(), y.deviation.to_bits());
    }
    assert_eq!(a.recovered_unitary, b.recovered_unitary);
}

#[test]
fn sequential_and_parallel_reports_are_identical() {
    let dims = BipartiteDims::new(3, 2).unwrap();
    let base = PipelineConfig::default().with_probes(40).with_seed(17);
    let seq = base.with_exec(Exec::Sequential);
    let par = base.with_exec(Exec::Parallel);

    let p = random_product_channel(3, 2, 2, 3).unwrap();
    let xi = haar_state(2, 4);
    same(
        &theorem1_factorize(&p.channel, &xi, dims, &seq).unwrap(),
        &theorem1_factorize(&p.channel, &xi, dims, &par).unwrap(),
    );
    same(
        &theorem3_factorize(&p.channel, dims, &seq).unwrap(),
        &theorem3_factorize(&p.channel, dims, &par).unwrap(),
    );
    let r = random_channel(6, 6, 2, 5).unwrap();
    same(
        &theorem3_factorize(&r, dims, &seq).unwrap(),
        &theorem3_factorize(&r, dims, &par).unwrap(),
    );
}

#[test]
fn exec_map_preserves_order() {
    for exec in [Exec::Sequential, Exec::Parallel] {
        assert_eq!(
            exec.map(100, |i| i * i),
            (0..100).map(|i| i * i).collect::<Vec<_>>()
        );
    }
}
