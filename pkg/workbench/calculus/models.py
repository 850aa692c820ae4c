"""Models for calculus"""
from django.db import models


class Run(models.Model):
    """A recorded run of one of the workbench commands.

    Attributes:
        kind (CharField): Which command produced the run.
        dialect (CharField): The dialect the network was read in.
        source (TextField): The network text, `id: P || ...`.
        verdict (JSONField): The command's JSON result (a verdict, the round
            certificates or an encoding report).
        trace_path (CharField): Where the trace was written, if one was.
        created (DateTimeField): When the run was recorded.
    """
    class Kind(models.TextChoices):
        ELECT = 'elect'
        ADVERSARY = 'adversary'
        EXPLORE = 'explore'
        ENCODE_CHECK = 'encode_check'

    kind = models.CharField(max_length=20, choices=Kind.choices)
    dialect = models.CharField(max_length=10)
    source = models.TextField()
    verdict = models.JSONField(default=dict)
    trace_path = models.CharField(max_length=500, blank=True)
    created = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created', '-id']

    @property
    def outcome(self):
        return self.verdict.get('verdict') or self.verdict.get('result', '')

    def to_json(self):
        return {
            'id': self.id,
            'kind': self.kind,
            'dialect': self.dialect,
            'source': self.source,
            'verdict': self.verdict,
            'trace_path': self.trace_path,
            'created': self.created.isoformat(),
        }

    def __str__(self):
        return f"{self.kind} #{self.id}: {self.outcome}"
