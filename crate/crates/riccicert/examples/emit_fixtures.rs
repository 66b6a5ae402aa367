fn main() {
    let s5 = riccicert::fixtures::s5_paths_fixture();
    let schema = riccicert::fixtures::metric_to_schema(&s5).unwrap();
    std::fs::write("fixtures/s5.json", serde_json::to_string_pretty(&schema).unwrap()).unwrap();
    let disk = riccicert::fixtures::disk_fixture(2, 4, 0.1).unwrap();
    let schema = riccicert::fixtures::metric_to_schema(&disk).unwrap();
    std::fs::write("fixtures/disk-n2-m4-rho0.1.json", serde_json::to_string_pretty(&schema).unwrap()).unwrap();
    println!("written");
}
