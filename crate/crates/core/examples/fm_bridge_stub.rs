//! Talk to a foundation-model sidecar over the line-delimited JSON protocol.
//! Here the sidecar is the built-in stub served on a local TCP port; a real
//! one would be launched with `ProcessBackend::spawn_command_line`.

use std::io::BufReader;
use std::net::TcpListener;

use spikecast::bridge::{serve_stub, FmBackend, TcpBackend};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let server = std::thread::spawn(move || -> std::io::Result<()> {
        let (stream, _) = listener.accept()?;
        serve_stub(BufReader::new(stream.try_clone()?), stream)
    });

    {
        let mut backend = TcpBackend::connect(&addr.to_string())?;
        println!("model: {}", backend.model_id()?);
        let forecast = backend.forecast(&[1.0, 2.0, 3.0, 10.0], 3, 1)?;
        println!("forecast: {forecast:?}");
    }
    server.join().expect("stub thread panicked")?;
    Ok(())
}
