"""
Core models for the certificate registry.
"""
import uuid
from django.db import models


class CertificateRecord(models.Model):
    """
    A specialness certificate as emitted by the pipeline.
    The certificate text is the source of truth; other columns are indexes.
    """
    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    input_hash = models.CharField(max_length=64, db_index=True)
    text_digest = models.CharField(max_length=64)
    datum_name = models.CharField(max_length=200, db_index=True)

    gamma_degree = models.PositiveIntegerField(default=1)
    vertex_degree = models.PositiveIntegerField(default=1)

    # Final complex statistics and the parsed voltages
    statistics = models.JSONField(default=dict)
    voltages = models.JSONField(default=dict, blank=True)

    certificate_text = models.TextField()
    input_text = models.TextField(blank=True)

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ["-created_at"]
        constraints = [
            models.UniqueConstraint(fields=["input_hash", "text_digest"], name="unique_certificate_text"),
        ]
        indexes = [
            models.Index(fields=["input_hash", "created_at"], name="core_cert_hash_created_idx"),
        ]

    def __str__(self):
        return f"{self.datum_name} ({self.input_hash[:12]}, degree {self.vertex_degree})"
