"""
Regenerating the figure data
============================

Every figure is a CSV with a commented header. This writes all of them to
./figures; plot with any tool. The same files come from
``ratekit figure <id> --out <file>``.
"""

from pathlib import Path

from ratekit import report

out = Path("figures")
out.mkdir(exist_ok=True)
for fig in report.FIGURES:
    table = report.figure_table(fig)
    (out / f"{fig}.csv").write_text(report.write_csv(table), encoding="utf-8", newline="")
    print(f"{fig}: {len(table.rows)} rows, columns {', '.join(table.columns)}")
