#!/usr/bin/env python3
"""
PDF export of benchmark and survey reports
"""

import io
from datetime import datetime
from typing import Optional
from xml.sax.saxutils import escape

from reportlab.lib.colors import HexColor, white
from reportlab.lib.enums import TA_CENTER, TA_LEFT
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from models import BenchmarkReport
from utils.helpers import format_optional_number, format_percentage

STATUS_COLORS = {
    'compliant': '#27ae60',
    'non-compliant': '#e67e22',
    'non-output': '#7f8c8d',
    'extraction-failed': '#c0392b',
    'engine-failed': '#8e44ad',
}


class BenchmarkPDFExporter:
    """Renders a BenchmarkReport as a PDF document"""

    def __init__(self):
        self.styles = getSampleStyleSheet()
        self.setup_custom_styles()

    def setup_custom_styles(self):
        """Setup custom paragraph styles"""
        self.title_style = ParagraphStyle('ReportTitle',
                                          parent=self.styles['Title'],
                                          fontSize=16,
                                          spaceAfter=30,
                                          textColor=HexColor('#2c3e50'),
                                          alignment=TA_CENTER)

        self.subtitle_style = ParagraphStyle('ReportSubtitle',
                                             parent=self.styles['Heading2'],
                                             fontSize=11,
                                             spaceAfter=20,
                                             textColor=HexColor('#34495e'),
                                             alignment=TA_CENTER)

        self.header_style = ParagraphStyle('ReportHeader',
                                           parent=self.styles['Heading3'],
                                           fontSize=10,
                                           spaceAfter=10,
                                           textColor=HexColor('#2c3e50'),
                                           alignment=TA_LEFT)

        # Formula cells wrap
        self.cell_style = ParagraphStyle('FormulaCell',
                                         parent=self.styles['Normal'],
                                         fontName='Courier',
                                         fontSize=7,
                                         leading=9)

        self.footer_style = ParagraphStyle('ReportFooter',
                                           parent=self.styles['Normal'],
                                           fontSize=8,
                                           textColor=HexColor('#7f8c8d'),
                                           alignment=TA_CENTER)

    def _summary_table(self, report: BenchmarkReport) -> Table:
        rows = [
            ['Mode', report.mode],
            ['Entries', str(len(report.entries))],
            ['Outputs', str(report.output_count)],
            ['Compliant', str(report.compliant_count)],
            ['Violation rate', format_percentage(report.violation_rate)],
            ['Average iterations', format_optional_number(report.average_iterations)],
        ]
        table = Table(rows, colWidths=[2 * inch, 2.5 * inch])
        table.setStyle(TableStyle([
            ('FONTNAME', (0, 0), (0, -1), 'Helvetica-Bold'),
            ('FONTNAME', (1, 0), (1, -1), 'Helvetica'),
            ('FONTSIZE', (0, 0), (-1, -1), 9),
            ('GRID', (0, 0), (-1, -1), 1, HexColor('#dee2e6')),
            ('BACKGROUND', (0, 0), (0, -1), HexColor('#f8f9fa')),
        ]))
        return table

    def _entries_table(self, report: BenchmarkReport) -> Table:
        table_data = [['Entry', 'Status', 'Iter', 'Calls', 'Violations', 'Formula']]
        styles = [
            # Header row
            ('BACKGROUND', (0, 0), (-1, 0), HexColor('#3498db')),
            ('TEXTCOLOR', (0, 0), (-1, 0), white),
            ('ALIGN', (0, 0), (-1, 0), 'CENTER'),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTSIZE', (0, 0), (-1, 0), 9),
            ('BOTTOMPADDING', (0, 0), (-1, 0), 12),

            # Data rows
            ('ALIGN', (0, 1), (-1, -1), 'LEFT'),
            ('FONTNAME', (0, 1), (-1, -1), 'Helvetica'),
            ('FONTSIZE', (0, 1), (-1, -1), 8),
            ('ROWBACKGROUNDS', (0, 1), (-1, -1), [white, HexColor('#f8f9fa')]),
            ('GRID', (0, 0), (-1, -1), 1, HexColor('#dee2e6')),
            ('VALIGN', (0, 0), (-1, -1), 'MIDDLE'),
            ('TOPPADDING', (0, 1), (-1, -1), 6),
            ('BOTTOMPADDING', (0, 1), (-1, -1), 6),
        ]

        for row, entry in enumerate(report.entries, start=1):
            table_data.append([
                entry.entry_id,
                entry.status,
                str(entry.iterations_used),
                str(entry.agent_calls),
                ", ".join(entry.violations) or "-",
                Paragraph(escape(entry.formula or "-"), self.cell_style),
            ])
            color = STATUS_COLORS.get(entry.status)
            if color:
                styles.append(('TEXTCOLOR', (1, row), (1, row), HexColor(color)))

        table = Table(table_data,
                      colWidths=[0.9 * inch, 1.1 * inch, 0.4 * inch, 0.45 * inch,
                                 1.1 * inch, 2.55 * inch],
                      repeatRows=1)
        table.setStyle(TableStyle(styles))
        return table

    def create_report_pdf(self, report: BenchmarkReport,
                          title: Optional[str] = None) -> bytes:
        """Create PDF with the summary and one row per entry"""
        buffer = io.BytesIO()
        doc = SimpleDocTemplate(buffer,
                                pagesize=A4,
                                rightMargin=54,
                                leftMargin=54,
                                topMargin=72,
                                bottomMargin=72)

        title = title or ("Initial Violation Survey" if report.mode == "survey"
                          else "Compliance Benchmark Report")
        story = [Paragraph(title, self.title_style), Spacer(1, 10)]

        subtitle_text = (f"Generated on: {datetime.now().strftime('%Y-%m-%d %H:%M')} | "
                         f"Entries: {len(report.entries)} | "
                         f"Violation rate: {format_percentage(report.violation_rate)}")
        story.append(Paragraph(subtitle_text, self.subtitle_style))

        story.append(Paragraph("Summary", self.header_style))
        story.append(self._summary_table(report))
        story.append(Spacer(1, 20))

        story.append(Paragraph(f"Entries ({len(report.entries)})", self.header_style))
        story.append(self._entries_table(report))
        story.append(Spacer(1, 20))

        story.append(Paragraph("safeltl compliance report", self.footer_style))

        doc.build(story)
        pdf_bytes = buffer.getvalue()
        buffer.close()

        return pdf_bytes


def export_report_pdf(report: BenchmarkReport, path: str, title: Optional[str] = None):
    """Write the report PDF to path"""
    pdf_bytes = BenchmarkPDFExporter().create_report_pdf(report, title)
    with open(path, 'wb') as f:
        f.write(pdf_bytes)
