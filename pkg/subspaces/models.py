"""
models.py
Defines the database model for the subspaces app.

Classes:
    - PipelineRun: one saved pipeline run, with its configuration, headline
      numbers, and the full report text.
"""

from django.db import models

from .matrix_io import render_report
from .utils import str_with_dots


class PipelineRun(models.Model):
    class Meta:
        db_table = 'pipelineRunTable'
        ordering = ['-created']

    DISTANCE_CHOICES = [
        ('grassmann', 'Grassmann'),
        ('ellipsoid', 'Ellipsoid'),
        ('asimov', 'Asimov'),
        ('projection', 'Projection'),
        ('chordal', 'Chordal'),
    ]
    MODEL_CHOICES = [('blackbox', 'Blackbox'), ('memory', 'Memory')]
    EVOLUTION_CHOICES = [('exact', 'Exact'), ('jacobi_anger', 'Jacobi-Anger')]

    created = models.DateTimeField(auto_now_add=True)
    distance_kind = models.CharField(max_length=20, choices=DISTANCE_CHOICES)
    input_model = models.CharField(max_length=20, choices=MODEL_CHOICES)
    evolution_mode = models.CharField(max_length=20, choices=EVOLUTION_CHOICES)
    qpe_bits = models.PositiveSmallIntegerField(help_text="Phase register size in bits")
    shots = models.PositiveIntegerField(blank=True, null=True, default=None, help_text="Empty for exact sampling")
    seed = models.IntegerField()
    m_path = models.CharField(max_length=500, blank=True, null=True, default=None, help_text="Matrix file for M")
    n_path = models.CharField(max_length=500, blank=True, null=True, default=None, help_text="Matrix file for N")
    n = models.PositiveIntegerField(help_text="Ambient dimension")
    k = models.PositiveIntegerField(help_text="Subspace dimension (n for ellipsoid runs)")
    classical_value = models.FloatField()
    quantum_estimate = models.FloatField()
    abs_error = models.FloatField()
    exact_p0 = models.FloatField(blank=True, null=True, default=None)
    sampled_p0 = models.FloatField(blank=True, null=True, default=None)
    epsilon_p = models.FloatField(blank=True, null=True, default=None)
    leaked_mass = models.FloatField(blank=True, null=True, default=None)
    alpha_total = models.FloatField(blank=True, null=True, default=None)
    report = models.TextField(help_text="Full report document")

    @classmethod
    def from_report(cls, report):
        """Build an unsaved row from a PipelineReport."""
        cfg = report.config
        return cls(
            distance_kind=cfg.distance_kind,
            input_model=cfg.input_model,
            evolution_mode=cfg.evolution_mode,
            qpe_bits=cfg.qpe_bits,
            shots=None if cfg.exact_sampling else cfg.shots,
            seed=cfg.seed,
            m_path=cfg.m_path,
            n_path=cfg.n_path,
            n=report.n,
            k=report.k,
            classical_value=report.classical_value,
            quantum_estimate=report.quantum_estimate,
            abs_error=report.abs_error,
            exact_p0=report.exact_p0,
            sampled_p0=report.sampled_p0,
            epsilon_p=report.epsilon_p,
            leaked_mass=report.leaked_mass,
            alpha_total=report.alpha_total,
            report=render_report(report),
        )

    @str_with_dots
    def __str__(self):
        return f'{self.distance_kind} ({self.input_model}, {self.qpe_bits} bits) #{self.pk}'
