use super::{attr, text, EmitOptions, Out, View};
use crate::model::{Part, UimlDocument};

const CONTAINERS: [&str; 4] = ["page", "div", "form", "fieldset"];

fn is_container(part: &Part) -> bool {
    CONTAINERS.contains(&part.widget_class.as_str())
}

/// Linear-flow HTML: containers nest, consecutive leaf widgets are separated
/// by `<br/>`.
pub fn emit_html(doc: &UimlDocument, opts: &EmitOptions) -> String {
    let view = View::new(doc);
    let mut out = Out::new(opts);
    if opts.include_prolog {
        out.line(0, "<!DOCTYPE html>");
    }
    out.line(0, "<html>");
    out.line(1, "<head>");
    out.line(2, &format!("<title>{}</title>", text(&view.title(doc, &opts.title_source))));
    out.line(1, "</head>");
    out.line(1, "<body>");
    let mut body: Vec<&Part> = Vec::new();
    for root in view.roots {
        if root.widget_class == "page" {
            body.extend(&root.children);
        } else {
            body.push(root);
        }
    }
    sequence(&view, &mut out, 2, body);
    out.line(1, "</body>");
    out.line(0, "</html>");
    out.buf
}

fn sequence<'a>(view: &View<'_>, out: &mut Out, depth: usize, parts: impl IntoIterator<Item = &'a Part>) {
    let mut prev_leaf = false;
    for part in parts.into_iter().filter(|p| view.visible(p)) {
        let leaf = !is_container(part);
        if leaf && prev_leaf {
            out.line(depth, "<br/>");
        }
        element(view, out, depth, part);
        prev_leaf = leaf;
    }
}

fn element(view: &View<'_>, out: &mut Out, depth: usize, part: &Part) {
    let name = attr("name", &part.name);
    let disabled = if view.enabled(part) { "" } else { " disabled=\"disabled\"" };
    match part.widget_class.as_str() {
        "page" | "div" | "form" | "fieldset" => {
            let (tag, open) = match part.widget_class.as_str() {
                "form" => ("form", format!("<form{name}>")),
                "fieldset" => ("fieldset", format!("<fieldset{name}>")),
                _ => ("div", format!("<div{}>", attr("id", &part.name))),
            };
            out.line(depth, &open);
            if tag == "fieldset" {
                if let Some(legend) = view.prop(part, "text") {
                    out.line(depth + 1, &format!("<legend>{}</legend>", text(&legend)));
                }
            }
            sequence(view, out, depth + 1, &part.children);
            out.line(depth, &format!("</{tag}>"));
        }
        "label" => out.line(depth, &format!("<label>{}</label>", text(&view.text(part)))),
        "input-text" => {
            let value = view.prop(part, "value").map(|v| attr("value", &v)).unwrap_or_default();
            out.line(depth, &format!("<input type=\"text\"{name}{value}{disabled}/>"));
        }
        "select" => {
            let selected = view.prop(part, "selected");
            let options: String = view
                .items(part, "items")
                .iter()
                .map(|item| {
                    let sel = if selected.as_deref() == Some(item.as_str()) {
                        " selected=\"selected\""
                    } else {
                        ""
                    };
                    format!("<option{sel}>{}</option>", text(item))
                })
                .collect();
            out.line(depth, &format!("<select{name}{disabled}>{options}</select>"));
        }
        kind @ ("button" | "submit" | "reset") => {
            let value = attr("value", &view.text(part));
            out.line(depth, &format!("<input type=\"{kind}\"{name}{value}{disabled}/>"));
        }
        _ => out.line(depth, &format!("<span{}>{}</span>", attr("id", &part.name), text(&view.text(part)))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_uiml;

    fn html(structure: &str, style: &str) -> String {
        let src = format!(
            r#"<uiml><head><meta name="Purpose" content="Form &amp; Co"/></head><interface name="I"><structure>{structure}</structure><style>{style}</style></interface></uiml>"#
        );
        emit_html(&parse_uiml(src.as_bytes()).unwrap(), &EmitOptions::default())
    }

    #[test]
    fn empty_structure_is_a_skeleton() {
        assert_eq!(
            html("", ""),
            "<!DOCTYPE html>\n<html>\n  <head>\n    <title>Form &amp; Co</title>\n  </head>\n  <body>\n  </body>\n</html>\n"
        );
    }

    #[test]
    fn select_options_from_items() {
        let out = html(
            r#"<part name="StateChoice" class="select"/>"#,
            "<property part-name=\"StateChoice\" name=\"items\">VA\nNY</property>",
        );
        assert!(out.contains(
            "<select name=\"StateChoice\"><option>VA</option><option>NY</option></select>"
        ));
    }

    #[test]
    fn leaves_are_separated_and_containers_nest() {
        let out = html(
            r#"<part name="P" class="page"><part name="F" class="form">
               <part name="L" class="label"/><part name="T" class="input-text"/>
               <part name="B" class="submit"/></part></part>"#,
            r#"<property part-name="L" name="text">Name</property><property part-name="B" name="text">Send</property>
               <property part-name="T" name="enabled">false</property>"#,
        );
        let body: Vec<&str> = out
            .lines()
            .skip_while(|l| !l.contains("<body>"))
            .skip(1)
            .take_while(|l| !l.contains("</body>"))
            .map(str::trim)
            .collect();
        assert_eq!(
            body,
            [
                "<form name=\"F\">",
                "<label>Name</label>",
                "<br/>",
                "<input type=\"text\" name=\"T\" disabled=\"disabled\"/>",
                "<br/>",
                "<input type=\"submit\" name=\"B\" value=\"Send\"/>",
                "</form>"
            ]
        );
    }

    #[test]
    fn invisible_parts_are_skipped() {
        let out = html(
            r#"<part name="P" class="page"><part name="L" class="label"/></part>"#,
            r#"<property part-name="L" name="visible">false</property>"#,
        );
        assert!(!out.contains("<label>"));
    }

    #[test]
    fn title_from_part() {
        let src = r#"<uiml><interface name="I"><structure><part name="P" class="page"/></structure></interface></uiml>"#;
        let doc = parse_uiml(src.as_bytes()).unwrap();
        let opts = EmitOptions {
            title_source: super::super::TitleSource::Part("P".into()),
            include_prolog: false,
            ..EmitOptions::default()
        };
        let out = emit_html(&doc, &opts);
        assert!(out.starts_with("<html>\n"));
        assert!(out.contains("<title>P</title>"));
    }
}
