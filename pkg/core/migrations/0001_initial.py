# Generated by Django 5.2.8 on 2026-10-18 09:40

import uuid
from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="CertificateRecord",
            fields=[
                (
                    "id",
                    models.UUIDField(
                        default=uuid.uuid4,
                        editable=False,
                        primary_key=True,
                        serialize=False,
                    ),
                ),
                ("input_hash", models.CharField(db_index=True, max_length=64)),
                ("text_digest", models.CharField(max_length=64)),
                ("datum_name", models.CharField(db_index=True, max_length=200)),
                ("gamma_degree", models.PositiveIntegerField(default=1)),
                ("vertex_degree", models.PositiveIntegerField(default=1)),
                ("statistics", models.JSONField(default=dict)),
                ("voltages", models.JSONField(blank=True, default=dict)),
                ("certificate_text", models.TextField()),
                ("input_text", models.TextField(blank=True)),
                ("created_at", models.DateTimeField(auto_now_add=True)),
                ("updated_at", models.DateTimeField(auto_now=True)),
            ],
            options={
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(
                        fields=["input_hash", "created_at"],
                        name="core_cert_hash_created_idx",
                    )
                ],
                "constraints": [
                    models.UniqueConstraint(
                        fields=("input_hash", "text_digest"),
                        name="unique_certificate_text",
                    )
                ],
            },
        ),
    ]
