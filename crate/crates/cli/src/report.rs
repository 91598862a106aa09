use clap::ValueEnum;
use serde_json::json;

use pcforge::checks::{render_text, totals, Section};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

/// One JSON object per line: a header, then one record per check, then totals.
fn render_json(header: &str, sections: &[Section], timings: bool) -> String {
    let mut out = String::new();
    let mut push = |v: serde_json::Value| {
        out.push_str(&v.to_string());
        out.push('\n');
    };
    push(json!({ "invocation": header }));
    for sec in sections {
        if timings {
            push(json!({ "section": sec.name, "seconds": sec.elapsed.as_secs_f64() }));
        }
        for l in &sec.lines {
            let mut v = json!({
                "section": sec.name,
                "status": l.status.label(),
                "id": l.id,
                "detail": l.detail,
            });
            if let Some(c) = &l.certificate {
                v["certificate"] = json!(c);
            }
            push(v);
        }
    }
    let (failed, total) = totals(sections);
    push(json!({ "checks": total, "failed": failed }));
    out
}

pub fn render(format: Format, header: &str, sections: &[Section], timings: bool) -> String {
    match format {
        Format::Text => render_text(header, sections, timings),
        Format::JsonLines => render_json(header, sections, timings),
    }
}
