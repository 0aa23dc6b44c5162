from core.log import _Log
from core.message_styler import MessageCatalog, MsgLevel, format_help


CATALOG = MessageCatalog({
    "demo": {
        "done": {"text": "wrote {path}", "level": "success", "badge": "OK"},
        "quiet": {"text": "step {n}", "level": "debug"},
        "fmt": {"text": "value {x:.3f}"},
    }
})


class Sink:
    def __init__(self):
        self.lines = []

    def __call__(self, rendered, *, level="INFO", raw_text="", **_):
        self.lines.append((level, raw_text, rendered))


def test_messages_are_buffered_until_a_sink_exists():
    log, sink = _Log(), Sink()
    log.key("demo.done", path="a.csv")
    log.info("plain")
    assert sink.lines == []
    log.configure(writer=sink, catalog=CATALOG)
    assert [raw for _, raw, _ in sink.lines] == ["wrote a.csv", "plain"]
    assert sink.lines[0][0] == MsgLevel.SUCCESS.value


def test_debug_gate():
    log, sink = _Log(), Sink()
    log.configure(writer=sink, catalog=CATALOG, debug=False)
    log.debug("hidden")
    log.key("demo.quiet", n=1)
    assert sink.lines == []
    log.debug_enabled = True
    log.debug("shown")
    log.key("demo.quiet", n=2)
    assert [raw for _, raw, _ in sink.lines] == ["shown", "step 2"]


def test_catalog_rendering():
    msg = CATALOG.get("demo.fmt", x=3.14159)
    assert msg.text == "value 3.142"
    assert CATALOG.get("demo.done").text == "wrote {path}"
    assert CATALOG.get("demo.bad.key").text == "demo.bad.key"
    assert not CATALOG.has("demo")


def test_help_lines_are_plain():
    assert format_help("x") == "[white]x[/]"
    log, sink = _Log(), Sink()
    log.configure(writer=sink, catalog=CATALOG)
    log.help("C01\tPASS")
    assert sink.lines[0][1] == "C01\tPASS"
    assert ":" not in sink.lines[0][2].split("C01")[0]


def test_broken_sink_does_not_break_logging():
    log, sink = _Log(), Sink()

    def broken(*_, **__):
        raise RuntimeError("closed")
    log.configure(writer=broken, catalog=CATALOG)
    log.set_writer(sink)
    log.warn("still here")
    assert sink.lines[-1][1] == "still here"


def test_file_sink_and_rotation(tmp_path):
    path = tmp_path / "logs" / "run.log"
    log, sink = _Log(), Sink()
    log.configure(writer=sink, catalog=CATALOG)
    log.configure_from_config({"logging": True, "paths": {"syslog": str(path)},
                               "log": {"rotate": {"max_bytes": 200, "backup_count": 2}}})
    for i in range(20):
        log.error(f"line {i:02d} with some padding to grow the file")
    log.close()
    assert path.exists()
    assert (tmp_path / "logs" / "run.log.1").exists()
    assert not (tmp_path / "logs" / "run.log.3").exists()
    last = path.read_text(encoding="utf-8").splitlines()[-1]
    assert last.endswith("[ERROR] line 19 with some padding to grow the file")


def test_reset_detaches_everything(tmp_path):
    log, sink = _Log(), Sink()
    log.configure(writer=sink, catalog=CATALOG)
    log.reset()
    log.info("buffered")
    assert sink.lines == []
    assert not log.debug_enabled


def test_message_params_may_use_any_name():
    log, sink = _Log(), Sink()
    log.configure(writer=sink, catalog=MessageCatalog({"demo": {"bad": {"text": "no {key} here"}}}))
    log.key("demo.bad", key="colour")
    assert sink.lines[0][1] == "no colour here"
    assert CATALOG.get("demo.done", key="k", path="b.csv").text == "wrote b.csv"
